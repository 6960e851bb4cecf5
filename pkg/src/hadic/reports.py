"""Report assembly and rendering.

Reports are deterministic: the canonical body contains no timestamps and
is serialized with sorted keys, so byte-identical output for identical
configs is a testable property.  Timing lives in a sidecar field that
golden comparisons strip.
"""

import json

SCHEMA_VERSION = 1


def suite_to_dict(report):
    return report.to_dict()


def assemble(config_dict, suite_reports, timings=None):
    body = {
        "schema": SCHEMA_VERSION,
        "config": config_dict,
        "suites": [suite_to_dict(r) for r in suite_reports],
        "pass": all(r.ok for r in suite_reports),
    }
    if timings is not None:
        body["timing_s"] = timings
    return body


def canonical_body(report_dict):
    """The golden-comparison body: everything except timing."""
    return {k: v for k, v in report_dict.items() if k != "timing_s"}


def to_json(report_dict) -> str:
    return json.dumps(report_dict, sort_keys=True, indent=2) + "\n"


def to_text(report_dict) -> str:
    lines = []
    cfg = report_dict["config"]
    lines.append(
        "config: gcm=%s level=%s n_hbar=%s m_z=%s weight_cap=%s"
        % (
            cfg.get("gcm"),
            cfg.get("level"),
            cfg.get("n_hbar"),
            cfg.get("m_z"),
            cfg.get("weight_cap"),
        )
    )
    lines.append("")
    width = max((len(s["lemma"]) for s in report_dict["suites"]), default=10)
    for suite in report_dict["suites"]:
        status = "PASS" if suite["pass"] else "FAIL"
        lines.append("%-*s  %s" % (width, suite["lemma"], status))
        for item in suite["pairs"]:
            mark = "ok" if item["pass"] else "FAIL"
            detail = ""
            if item.get("witness"):
                detail = "  witness: %s" % item["witness"]
            if item.get("window"):
                detail += "  window: %s" % item["window"]
            lines.append(
                "  %-6s (%s, %s)%s" % (mark, item["i"], item["j"], detail)
            )
        for note in suite.get("notes", []):
            lines.append("  note: %s" % note)
    lines.append("")
    lines.append("overall: %s" % ("PASS" if report_dict["pass"] else "FAIL"))
    return "\n".join(lines) + "\n"
