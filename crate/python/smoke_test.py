"""Smoke test for the hexpr extension module."""

import json

import hexpr

expr = hexpr.parse("JOIN[ Who founded #1?, Which company makes the iPhone? ]")
assert expr.kind == "JOIN", expr.kind
assert expr.right.text == "Which company makes the iPhone?"
assert expr.execution_order() == ["Which company makes the iPhone?", "Who founded #1?"]
assert hexpr.parse(str(expr)) == expr
assert hexpr.serialize("JOIN[a,b]") == "JOIN[ a, b ]"

try:
    hexpr.parse("JOIN[ a ]")
except hexpr.ParseError as e:
    assert isinstance(e, ValueError)
else:
    raise AssertionError("arity error not raised")

report = hexpr.validate("JOIN[ Who founded #2?, Which company makes the iPhone? ]")
assert not report["executable"]
assert report["diagnostics"]

assert hexpr.find_placeholders("Who directed Ans#2 and #1?") == [(2, "Ans#2"), (1, "#1")]
assert hexpr.normalize_answer("The  Eiffel Tower!") == "eiffel tower"
assert hexpr.exact_match("the Apple", ["apple"]) == 1.0
assert abs(hexpr.token_f1("Steve Jobs", ["Steve Wozniak"]) - 0.5) < 1e-9
assert hexpr.coerce_number("1,200") == 1200.0

facts = {
    "Which company makes the iPhone?": "Apple",
    "Who founded Apple?": ["Steve Jobs", "Steve Wozniak"],
}
result = hexpr.execute("JOIN[ Who founded #1?, Which company makes the iPhone? ]", facts)
assert result.status == "SUCCESS", result
assert result.answer == "Steve Jobs", result
assert result.memory == {1: "Apple", 2: "Steve Jobs"}
assert json.loads(result.trace_json)

fallback = hexpr.execute(["JOIN[ broken", "Which company makes the iPhone?"], facts)
assert fallback.executed_candidate == 2 and fallback.answer == "Apple"

missing = hexpr.execute("Who is unknown?", facts)
assert missing.status != "SUCCESS" and missing.answer == ""

record = {
    "_id": "x1",
    "type": "compositional",
    "question": "Who is the father of the director of Up?",
    "answer": "John Docter",
    "evidences": [["Up", "director", "Pete Docter"], ["Pete Docter", "father", "John Docter"]],
    "context": [],
}
converted = hexpr.convert("2wiki", json.dumps(record))
assert hexpr.parse(converted).kind == "JOIN", converted

print("smoke test passed")
