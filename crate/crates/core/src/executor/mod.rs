//! The hybrid executor: primitives go to a [`Reader`], operations are
//! evaluated symbolically, and every step lands in an [`ExecutionTrace`].
//!
//! Evaluation visits the right operand before the left one, so primitive
//! answers fill the [`AnswerMemory`] in reverse in-order. A primitive's
//! placeholders are rewritten from memory immediately before the reader
//! sees it.

mod entity;
mod memory;
mod normalize;
mod ops;
mod trace;
mod values;

use serde::{Deserialize, Serialize};

pub use entity::{extract_main_entity, EntityExtractor, DEFAULT_TEMPLATE_HEADS};
pub use memory::{substitute_placeholders, substitute_with, AnswerMemory, MissingSlot};
pub use normalize::{normalize_answer, normalize_with, normalized_tokens, NormalizeOptions};
pub use ops::{
    apply_operation, EmptyIntersectionPolicy, OpOutcome, Operand, SoftFail, TiePolicy,
};
pub use trace::{
    Attempt, ExecStatus, ExecutionTrace, FailureStage, StepKind, TraceStep, PARSE_STAGE_CODES,
};
pub use values::{
    coerce_number, parse_comparable, parse_date, parse_number, render_number, Answer,
    AnswerValue, ComparableValue, DateFormat, NotNumeric,
};

use crate::hexpr::{
    parse_hexpression, serialize, validate_with, Branch, HExpr, NodePath, ValidateConfig,
};
use crate::readers::{Passage, Reader, ReaderRequest};

#[derive(Debug, Clone)]
pub struct ExecConfig {
    /// Reader candidates requested per primitive; at least 1.
    pub top_k: usize,
    pub entity: EntityExtractor,
    pub date_formats: Vec<DateFormat>,
    pub normalization: NormalizeOptions,
    pub tie_policy: TiePolicy,
    pub empty_intersection_policy: EmptyIntersectionPolicy,
    /// Depth limit and placeholder recognizer shared with validation.
    pub validation: ValidateConfig,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            top_k: 5,
            entity: EntityExtractor::default(),
            date_formats: DateFormat::DEFAULT_ORDER.to_vec(),
            normalization: NormalizeOptions::default(),
            tie_policy: TiePolicy::default(),
            empty_intersection_policy: EmptyIntersectionPolicy::default(),
            validation: ValidateConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub answer: AnswerValue,
    pub trace: ExecutionTrace,
}

impl ExecutionResult {
    pub fn status(&self) -> &ExecStatus {
        &self.trace.status
    }

    /// Rendered final answer. A ranked AND result renders its top entry.
    pub fn predicted(&self) -> String {
        self.answer.render()
    }

    /// 1-based index of the candidate expression that produced this result.
    pub fn executed_candidate(&self) -> usize {
        self.trace.attempts.last().map_or(1, |a| a.candidate)
    }
}

/// Every candidate in a fallback run failed hard.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("all {} candidate expression(s) failed", attempts.len())]
pub struct AllCandidatesFailed {
    pub attempts: Vec<Attempt>,
    /// The last candidate that got as far as execution, with every attempt
    /// recorded on its trace.
    pub last: Option<Box<ExecutionResult>>,
}

impl AllCandidatesFailed {
    /// Status of the final attempt, or `HARD_FAIL(no_candidates)`.
    pub fn status(&self) -> ExecStatus {
        self.attempts
            .last()
            .map(|a| a.status.clone())
            .unwrap_or_else(|| ExecStatus::HardFail("no_candidates".into()))
    }

    /// A trace documenting the failed run, suitable for writing to disk.
    pub fn trace(&self) -> ExecutionTrace {
        match &self.last {
            Some(r) => r.trace.clone(),
            None => ExecutionTrace {
                expression: self
                    .attempts
                    .last()
                    .map(|a| a.expression.clone())
                    .unwrap_or_default(),
                steps: Vec::new(),
                memory: Default::default(),
                status: self.status(),
                error: self.attempts.last().and_then(|a| a.message.clone()),
                diagnostics: Vec::new(),
                attempts: self.attempts.clone(),
            },
        }
    }
}

struct HardFail {
    code: &'static str,
    message: String,
}

struct Run<'a, R: Reader + ?Sized> {
    passages: &'a [Passage],
    reader: &'a R,
    config: &'a ExecConfig,
    memory: AnswerMemory,
    steps: Vec<TraceStep>,
    first_soft: Option<SoftFail>,
}

impl<'a, R: Reader + ?Sized> Run<'a, R> {
    fn eval(&mut self, node: &HExpr, path: NodePath) -> Result<Operand, HardFail> {
        match node {
            HExpr::Primitive(p) => self.primitive(&p.text, p.entity_hint.as_deref(), path),
            HExpr::Operation { kind, left, right } => {
                let r = self.eval(right, path.child(Branch::Right))?;
                let l = self.eval(left, path.child(Branch::Left))?;
                let outcome = apply_operation(*kind, &l, &r, self.config);
                self.note_soft(outcome.soft_fail);
                self.steps.push(TraceStep {
                    step_index: self.steps.len() + 1,
                    node_path: path,
                    kind: StepKind::Operation,
                    slot: None,
                    question: None,
                    question_after_substitution: None,
                    reader_candidates: None,
                    op_kind: Some(*kind),
                    operands: Some([l.value.clone(), r.value.clone()]),
                    output: outcome.value.clone(),
                    soft_fail: outcome.soft_fail.map(|f| f.code().to_string()),
                    note: outcome.note,
                });
                Ok(Operand {
                    value: outcome.value,
                    // A subtree is about the entity its first-executed
                    // question asks about.
                    entity: r.entity,
                    slot: l.slot.or(r.slot),
                })
            }
        }
    }

    fn primitive(
        &mut self,
        text: &str,
        hint: Option<&str>,
        path: NodePath,
    ) -> Result<Operand, HardFail> {
        let question = substitute_with(text, &self.memory, &self.config.validation.recognizer)
            .map_err(|e| HardFail {
                code: "unresolved_placeholder",
                message: format!("{e} at {path}"),
            })?;
        let request = ReaderRequest {
            question: question.clone(),
            passages: self.passages.to_vec(),
            top_k: self.config.top_k,
        };
        let mut candidates = self.reader.answer(&request).map_err(|e| HardFail {
            code: "reader_unavailable",
            message: e.to_string(),
        })?;
        candidates.truncate(self.config.top_k);

        let (value, soft) = match candidates.first() {
            Some(top) => (
                AnswerValue::span(top.answer.clone()).with_candidates(candidates.clone()),
                None,
            ),
            None => (AnswerValue::empty(), Some(SoftFail::NoAnswer)),
        };
        let slot = self.memory.push(value.render());
        self.note_soft(soft);
        let entity = self.config.entity.extract(&question, hint);
        self.steps.push(TraceStep {
            step_index: self.steps.len() + 1,
            node_path: path,
            kind: StepKind::Primitive,
            slot: Some(slot),
            question: Some(text.to_string()),
            question_after_substitution: Some(question),
            reader_candidates: Some(candidates),
            op_kind: None,
            operands: None,
            output: value.clone(),
            soft_fail: soft.map(|f| f.code().to_string()),
            note: None,
        });
        Ok(Operand::new(value, entity, Some(slot)))
    }

    fn note_soft(&mut self, fail: Option<SoftFail>) {
        if self.first_soft.is_none() {
            self.first_soft = fail;
        }
    }
}

/// Executes `expr` bottom-up. Never panics or errors: hard failures
/// (invalid expression, unresolved placeholder, unreachable reader) come
/// back as a `HARD_FAIL` status with an empty answer and a partial trace.
pub fn execute<R: Reader + ?Sized>(
    expr: &HExpr,
    passages: &[Passage],
    reader: &R,
    config: &ExecConfig,
) -> ExecutionResult {
    let expression = serialize(expr);
    let report = validate_with(expr, &config.validation);
    if !report.executable {
        let error = report.errors().next().map(|d| d.message.clone());
        return ExecutionResult {
            answer: AnswerValue::empty(),
            trace: ExecutionTrace {
                expression,
                steps: Vec::new(),
                memory: Default::default(),
                status: ExecStatus::HardFail("invalid_expression".into()),
                error,
                diagnostics: report.diagnostics,
                attempts: Vec::new(),
            },
        };
    }

    let mut run = Run {
        passages,
        reader,
        config,
        memory: AnswerMemory::new(),
        steps: Vec::with_capacity(expr.node_count()),
        first_soft: None,
    };
    let outcome = run.eval(expr, NodePath::root());
    let (answer, status, error) = match outcome {
        Ok(ev) => {
            let status = match run.first_soft {
                Some(f) => ExecStatus::SoftFail(f.code().to_string()),
                None => ExecStatus::Success,
            };
            (ev.value, status, None)
        }
        Err(h) => (
            AnswerValue::empty(),
            ExecStatus::HardFail(h.code.to_string()),
            Some(h.message),
        ),
    };
    ExecutionResult {
        answer,
        trace: ExecutionTrace {
            expression,
            steps: run.steps,
            memory: run.memory.slots().clone(),
            status,
            error,
            diagnostics: report.diagnostics,
            attempts: Vec::new(),
        },
    }
}

/// Tries candidate expressions in order and returns the first run that
/// does not fail hard. Every attempt is recorded on the returned trace.
pub fn execute_with_fallback<R: Reader + ?Sized, S: AsRef<str>>(
    candidates: &[S],
    passages: &[Passage],
    reader: &R,
    config: &ExecConfig,
) -> Result<ExecutionResult, AllCandidatesFailed> {
    let mut attempts = Vec::new();
    let mut last: Option<ExecutionResult> = None;

    for (i, text) in candidates.iter().enumerate() {
        let text = text.as_ref();
        let expr = match parse_hexpression(text) {
            Ok(e) => e,
            Err(e) => {
                attempts.push(Attempt {
                    candidate: i + 1,
                    expression: text.to_string(),
                    status: ExecStatus::HardFail("parse_error".into()),
                    message: Some(format!("{} ({})", e, e.code())),
                    diagnostics: Vec::new(),
                });
                continue;
            }
        };
        let mut result = execute(&expr, passages, reader, config);
        let status = result.trace.status.clone();
        attempts.push(Attempt {
            candidate: i + 1,
            expression: result.trace.expression.clone(),
            status: status.clone(),
            message: result.trace.error.clone(),
            diagnostics: if status.is_hard_fail() {
                result.trace.diagnostics.clone()
            } else {
                Vec::new()
            },
        });
        if !status.is_hard_fail() {
            result.trace.attempts = attempts;
            return Ok(result);
        }
        if status != ExecStatus::HardFail("invalid_expression".into()) {
            last = Some(result);
        }
    }

    let last = last.map(|mut r| {
        r.trace.attempts = attempts.clone();
        Box::new(r)
    });
    Err(AllCandidatesFailed { attempts, last })
}
