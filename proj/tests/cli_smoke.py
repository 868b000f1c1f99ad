#!/usr/bin/env python3
"""End-to-end checks of the mua command line: exit codes and payloads."""

import json
import os
import subprocess
import sys
import tempfile

MUA, DATA = sys.argv[1], sys.argv[2]
failures = 0


def run(*args, env=None):
    p = subprocess.run([MUA, *args], capture_output=True, text=True, env=env)
    return p.returncode, p.stdout, p.stderr


def check(name, ok, detail=""):
    global failures
    print(("ok   " if ok else "FAIL ") + name + ("" if ok else "  " + detail))
    if not ok:
        failures += 1


def data(name):
    return os.path.join(DATA, name)


def report(*args, env=None):
    code, out, err = run(*args, env=env)
    try:
        return code, json.loads(out)
    except json.JSONDecodeError:
        return code, {"stdout": out, "stderr": err}


code, r = report("solve", "--instance", data("ex1.json"), "--method", "es")
check("solve es ex1", code == 0 and r["result"]["profile"] == "9/4 9/4 9/4 9/4 2 1", str(r))
check("solve es ex1 ram row sums", r["result"]["ram"]["f"] == {"alpha": "1"}, str(r["result"]["ram"]))

code, r = report("solve", "--instance", data("ex1.json"), "--method", "epo")
check("solve epo ex1", code == 0 and r["result"]["profile"] == "37/15 37/15 37/15 37/15 22/15 2/3", str(r))

code, out, _ = run("--format", "table", "solve", "--instance", data("ex1.json"), "--method", "epo")
check("epo table shows two decimals", "2.47" in out and "1.47" in out and "0.67" in out, out)

code, r = report("solve", "--instance", data("ex4.json"), "--method", "es-star")
check("solve es-star ex4", code == 0 and r["result"]["profile"] == "4/5 4/5 4/5 4/5 4/5", str(r))

code, r = report("solve", "--instance", data("ex1.json"), "--method", "rp")
check("solve rp ex1 equals epo", code == 0 and r["result"]["profile"] == "37/15 37/15 37/15 37/15 22/15 2/3")

code, r = report("solve", "--instance", data("ex1.json"), "--method", "priority", "--order", "f,e,a,b,c,d")
check("solve priority", code == 0 and r["result"]["utilities"]["f"] == "1" and r["result"]["utilities"]["e"] == "2")

code, r = report("solve", "--instance", data("ex1.json"), "--method", "priority")
check("priority without order is an input error", code == 2 and r["result"]["where"] == "--order", str(r))

code, r = report("solve", "--instance", data("ex2.json"), "--method", "rp")
check("rp on nine agents is a cap refusal", code == 3, str(r))

code, r = report("cce", "--instance", data("ex1.json"), "--action", "range")
if code == 0:
    by = {a["agent"]: a["range"] for a in r["result"]["agents"]}
    check("cce range ex1 a:d", all(by[x] == {"lo": "9/4", "hi": "12/5"} for x in "abcd"), str(by))
    check("cce range ex1 e", by["e"] == {"lo": "7/5", "hi": "2"}, str(by))
    check("cce range ex1 f", by["f"] == {"lo": "1", "hi": "1"}, str(by))
    check("cce range ex1 gamma price", r["result"]["prices"]["gamma"] == {"lo": "0", "hi": "4/9"})
    check("cce range ex1 free prices", "gamma" in r["result"]["free_prices"])
else:
    check("cce range ex1", False, str(r))

code, r = report("cce", "--instance", data("ex3.json"), "--action", "find")
check("cce find ex3", code == 0 and r["result"]["profile"] == "5/2 5/2 5/2 5/2 5/2 5/2 1", str(r))

code, r = report("cce", "--instance", data("ex2.json"), "--action", "verify", "--equilibrium", data("ex2_es_ram.json"))
check("cce verify ex2 es ram", code == 4 and r["result"]["message"] == "unaffordable bundle for agents a:c", str(r))

code, r = report("cce", "--instance", data("ex2.json"), "--action", "find")
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump({"ram": r["result"]["equilibrium"]["ram"], "prices": r["result"]["equilibrium"]["prices"]}, f)
code, r = report("cce", "--instance", data("ex2.json"), "--action", "verify", "--equilibrium", f.name)
check("cce verify of a found equilibrium", code == 0 and r["result"]["verified"] is True, str(r))
os.unlink(f.name)

code, out, _ = run("--format", "table", "cce", "--instance", data("ex2.json"), "--action", "find")
check("equilibrium table ex2", all(x in out for x in ("0.97", "0.54", "0.25", "0.75", "gamma,delta", "a:c")), out)

code, r = report("cce", "--instance", data("ex1.json"), "--action", "find", env={**os.environ, "MUA_CAPS": "max_objects=2"})
check("cap from environment", code == 3, str(r))

code, r = report("audit", "--instance", data("ex3.json"), "--property", "manipulate", "--solution", "cce",
                 "--max-coalition", "3")
found = r.get("result", {}).get("found")
check("audit manipulate cce ex3", code == 5 and found and found["coalition"] == ["a", "b", "c"], str(r)[:400])
if found:
    check("cce witness misreport", found["dropped"] == {"a": ["beta"], "b": ["gamma"], "c": ["delta"]})

code, r = report("audit", "--instance", data("ex1.json"), "--property", "manipulate", "--solution", "es",
                 "--max-coalition", "6")
check("audit manipulate es ex1", code == 0 and r["result"]["found"] is None and r["result"]["complete"], str(r))

code, r = report("audit", "--instance", data("ex4.json"), "--property", "ipo", "--solution", "es")
rows = r.get("result", {}).get("violation", {}).get("rows", [])
check("audit ipo es ex4", code == 5 and rows and rows[0]["after"] == "7/4" and rows[0]["expected"] == "9/5", str(r))

code, r = report("audit", "--instance", data("ex4.json"), "--property", "ipo", "--solution", "cce")
check("audit ipo cce ex4", code == 0, str(r))

code, r = report("audit", "--instance", data("ex1.json"), "--property", "lorenz", "--trials", "200")
check("audit lorenz es", code == 0 and r["result"]["counterexamples"] == 0, str(r))
code, r = report("audit", "--instance", data("ex1.json"), "--property", "lorenz", "--solution", "epo")
check("audit lorenz epo finds a counterexample", code == 5, str(r))
code, r2 = report("audit", "--instance", data("ex1.json"), "--property", "lorenz", "--solution", "epo")
check("audit is deterministic", r["result"] == r2["result"])

code, r = report("audit", "--instance", data("ex2.json"), "--property", "envy")
check("audit envy es", code == 0, str(r))
code, r = report("audit", "--instance", data("ex1.json"), "--property", "nonbossy")
check("audit nonbossy es", code == 0, str(r))
code, r = report("audit", "--instance", data("ex1.json"), "--property", "nonbossy", "--solution", "epo")
check("nonbossy is es only", code == 2, str(r))

code, r = report("solve", "--instance", data("ex4.json"), "--method", "es")
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump(r["result"]["ram"], f)
code, r = report("decompose", "--instance", data("ex4.json"), "--ram", f.name, "--sample-seed", "7")
check("decompose ex4", code == 0 and r["result"]["count"] == 5
      and all(c["weight"] == "1/5" for c in r["result"]["components"]), str(r))
check("decompose sample", "sample" in r["result"])
code, r2 = report("decompose", "--instance", data("ex4.json"), "--ram", f.name, "--sample-seed", "7")
check("decompose sample is deterministic", r["result"]["sample"] == r2["result"]["sample"])
os.unlink(f.name)

code, r = report("solve", "--instance", data("ex1.json"), "--method", "es")
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump({"ram": r["result"]["ram"]}, f)
code, r = report("decompose", "--instance", data("ex1.json"), "--ram", f.name)
check("decompose ex1 reconstructs", code == 0 and r["result"]["reconstructs"]
      and r["result"]["input_digest"] == r["result"]["reconstruction_digest"], str(r))
os.unlink(f.name)

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump({"f": {"gamma": "1/2"}}, f)
code, r = report("decompose", "--instance", data("ex1.json"), "--ram", f.name)
check("decompose rejects an infeasible ram", code == 2, str(r))
os.unlink(f.name)

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    f.write('{"agents": ["a"], "objects": [{"id": "x", "capacity": 0}], "acceptable": {"a": ["x"]}}')
code, r = report("solve", "--instance", f.name, "--method", "es")
check("validation error location", code == 2 and r["result"]["where"] == "objects[0].capacity", str(r))
os.unlink(f.name)

code, _, _ = run("solve", "--instance", data("ex1.json"), "--method", "nope")
check("bad flag value", code == 2)

code, out, _ = run("fixture", "--name", "ex1")
check("fixture matches data file", code == 0 and json.loads(out) == json.load(open(data("ex1.json"))))

sys.exit(1 if failures else 0)
