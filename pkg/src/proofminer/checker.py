"""Stub proof checker for desk-scale runs.

    proofminer-stub-checker RULES.json  < request.json

The request on stdin is ``{"library": ..., "target": ..., "script": [...]}``.
The rules file maps a target name to the scripts it accepts.  A rule is
either a rendered script string (shell-style wildcards allowed, e.g.
``"move=> m n p q; rewrite maxnA *"``) or a script in the JSON step format,
compared exactly.  A ``"*"`` key applies to every target.

Exit status: 0 accepted, 1 rejected, 2 bad request or rules file.
Set ``"sleep"`` at the top level of the rules file to delay every answer
(seconds), which is handy for exercising timeouts.
"""
import fnmatch
import json
import sys
import time

from .terms import TacticScript


def load_rules(path):
    with open(path) as fh:
        rules = json.load(fh)
    if not isinstance(rules, dict):
        raise ValueError("rules file must hold a JSON object")
    return rules


def accepts(rules, target, script):
    rendered = script.render()
    for key in (target, "*"):
        for rule in rules.get(key, []):
            if isinstance(rule, str):
                if fnmatch.fnmatchcase(rendered, rule):
                    return True
            elif TacticScript.from_json(rule) == script:
                return True
    return False


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: proofminer-stub-checker RULES.json", file=sys.stderr)
        return 2
    try:
        rules = load_rules(argv[0])
        request = json.load(sys.stdin)
        target = request["target"]
        script = TacticScript.from_json(request["script"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"stub checker: {exc}", file=sys.stderr)
        return 2
    delay = rules.get("sleep", 0)
    if delay:
        time.sleep(float(delay))
    return 0 if accepts(rules, target, script) else 1


if __name__ == "__main__":
    sys.exit(main())
