#!/usr/bin/env python3
"""Regenerates tests/fixtures/three_apps: a manifest plus PMD reports for three
synthetic applications. Output is fully determined by the seed."""

import argparse
import datetime as dt
import json
import random
from pathlib import Path
from xml.sax.saxutils import quoteattr

RULES = [
    ("ExcessiveClassLength", "class"),
    ("ExcessiveMethodLength", "method"),
    ("ExcessiveParameterList", "method"),
    ("CouplingBetweenObjects", "class"),
    ("DepthOfInheritance", "class"),
    ("NumberOfChildren", "class"),
]

APPS = [("alpha", 10, 40), ("beta", 8, 30), ("gamma", 12, 50)]


def smells_for(rng, app, count):
    out = []
    for k in range(count):
        rule, level = RULES[rng.randrange(len(RULES))]
        pkg = rng.choice(["core", "ui", "db"])
        cls = f"{pkg.capitalize()}{k}"
        smell = {
            "rule": rule,
            "file": f"/build/{app}/src/{pkg}/{cls}.php",
            "package": pkg,
            "class": cls,
            "line": 1 + rng.randrange(400),
        }
        if level == "method":
            smell["method"] = f"run{k % 7}"
        out.append(smell)
    return out


def presence(rng, versions):
    on = rng.random() < 0.5
    bits = []
    for _ in range(versions):
        if rng.random() < 0.18:
            on = not on
        bits.append(on)
    return bits


def pmd_xml(smells):
    by_file = {}
    for s in smells:
        by_file.setdefault(s["file"], []).append(s)
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', '<pmd version="2.8.2" timestamp="2020-01-01T00:00:00">']
    for name in sorted(by_file):
        lines.append(f"  <file name={quoteattr(name)}>")
        for s in sorted(by_file[name], key=lambda s: (s["line"], s["rule"])):
            attrs = {
                "beginline": str(s["line"]),
                "endline": str(s["line"] + 40),
                "rule": s["rule"],
                "ruleset": "Code Size Rules",
                "package": s["package"],
                "class": s["class"],
            }
            if "method" in s:
                attrs["method"] = s["method"]
            rendered = " ".join(f"{k}={quoteattr(v)}" for k, v in attrs.items())
            lines.append(f"    <violation {rendered}>")
            lines.append(f"      {s['rule']} triggered")
            lines.append("    </violation>")
        lines.append("  </file>")
    # An out-of-ruleset violation that ingestion must skip.
    lines.append('  <file name="/build/vendor/lib.php">')
    lines.append('    <violation beginline="1" endline="2" rule="CyclomaticComplexity" priority="3">x</violation>')
    lines.append("  </file>")
    lines.append("</pmd>")
    return "\n".join(lines) + "\n"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests/fixtures/three_apps"))
    parser.add_argument("--seed", type=int, default=20)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    (out / "reports").mkdir(parents=True, exist_ok=True)
    rows = ["app,version,timestamp,report_path,lloc,loc,classes,tag"]
    for app, versions, count in APPS:
        smells = smells_for(rng, app, count)
        bits = [presence(rng, versions) for _ in smells]
        t = dt.date(2011, 3, 1) + dt.timedelta(days=rng.randrange(200))
        lloc = 20000 + rng.randrange(5000)
        for v in range(versions):
            present = [s for s, b in zip(smells, bits) if b[v]]
            version = f"{v // 4 + 1}.{v % 4}.0"
            rel = f"reports/{app}-{version}.xml"
            (out / rel).write_text(pmd_xml(present))
            classes = 150 + v * 11
            rows.append(f"{app},{version},{t.isoformat()},{rel},{lloc},{lloc * 3 + 17},{classes},\"r{v}, {app}\"")
            t += dt.timedelta(days=30 + rng.randrange(150))
            lloc = max(1000, lloc + rng.randrange(-1500, 4000))
    (out / "manifest.csv").write_text("\n".join(rows) + "\n")
    (out / "rules.json").write_text(json.dumps({"ExcessiveMethodLength": 100}) + "\n")


if __name__ == "__main__":
    main()
