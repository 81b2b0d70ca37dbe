#!/usr/bin/env python3
"""Writes the 12-editor stub-meta-history fixture and its Barnstar list.

Usage: make_fixture.py OUT_DIR
The output is deterministic; the committed copies under tests/fixtures were
produced by this script.
"""
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path
from xml.sax.saxutils import escape

DAY = timedelta(days=1)

# name, is_ip, edits, distinct pages, first edit, lifecycle days,
# P(minor), P(comment), byte delta range
PROFILES = [
    ("Aldebaran", False, 36, 24, "2003-02-01", 2500, 0.10, 0.95, (20, 400)),
    ("Bellatrix", False, 28, 14, "2004-06-15", 1800, 0.20, 0.80, (10, 160)),
    ("Capella", False, 6, 4, "2009-11-20", 50, 0.00, 0.60, (5, 40)),
    ("203.0.113.5", True, 4, 3, "2010-03-01", 40, 0.00, 0.00, (-300, -20)),
    ("198.51.100.23", True, 24, 16, "2008-01-10", 700, 1.00, 0.00, (20, 120)),
    ("Deneb", False, 3, 2, "2002-04-01", 2600, 0.00, 1.00, (30, 90)),
    ("Electra", False, 22, 12, "2005-09-01", 1500, 0.30, 0.70, (15, 200)),
    ("Fomalhaut", False, 9, 5, "2007-07-07", 900, 0.40, 0.30, (-500, 100)),
    ("Gienah", False, 15, 6, "2006-02-02", 1200, 0.90, 0.10, (1, 30)),
    ("Hadar", False, 30, 20, "2003-10-10", 2200, 0.05, 1.00, (40, 300)),
    ("192.0.2.44", True, 1, 1, "2010-05-05", 0, 0.00, 0.00, (60, 60)),
    ("Izar", False, 12, 8, "2008-08-08", 600, 0.25, 0.50, (10, 90)),
]
BARNSTARS = ["Aldebaran", "Bellatrix", "Electra", "Hadar"]
PAGES = 30
DUMP_DATE = "2010-06-01T00:00:00Z"


def parse_day(s):
    return datetime.strptime(s, "%Y-%m-%d").replace(tzinfo=timezone.utc)


def edits(rng):
    out = []
    for name, is_ip, n, n_pages, first, span, p_minor, p_comment, (lo, hi) in PROFILES:
        pages = rng.sample(range(PAGES), n_pages)
        touched = pages + [rng.choice(pages) for _ in range(n - n_pages)]
        start = parse_day(first)
        # first and last edits pin the lifecycle; the rest fall in between
        offsets = sorted([0, span] + [rng.randint(0, span) for _ in range(n - 2)])[:n]
        for page, off in zip(touched, offsets):
            when = start + off * DAY + timedelta(seconds=rng.randint(0, 86399))
            out.append({
                "editor": name,
                "ip": is_ip,
                "page": page,
                "time": when,
                "minor": rng.random() < p_minor,
                "comment": rng.random() < p_comment,
                "delta": rng.randint(lo, hi),
            })
    return out


def render(revs):
    lines = [
        '<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.10/" version="0.10" xml:lang="en">',
        "  <siteinfo>",
        "    <sitename>Fixture</sitename>",
        "    <dbname>fixturewiki</dbname>",
        "  </siteinfo>",
    ]
    rev_id = 1000
    for page in range(PAGES):
        mine = sorted((r for r in revs if r["page"] == page), key=lambda r: r["time"])
        if not mine:
            continue
        lines += ["  <page>", f"    <title>Article {page + 1}</title>", "    <ns>0</ns>", f"    <id>{page + 1}</id>"]
        size = 0
        for r in mine:
            rev_id += 1
            size = max(0, size + r["delta"])
            who = f"<ip>{r['editor']}</ip>" if r["ip"] else f"<username>{escape(r['editor'])}</username>"
            lines += [
                "    <revision>",
                f"      <id>{rev_id}</id>",
                f"      <timestamp>{r['time'].strftime('%Y-%m-%dT%H:%M:%SZ')}</timestamp>",
                f"      <contributor>{who}</contributor>",
            ]
            if r["minor"]:
                lines.append("      <minor />")
            if r["comment"]:
                lines.append(f"      <comment>edit {rev_id}</comment>")
            lines += [
                "      <model>wikitext</model>",
                "      <format>text/x-wiki</format>",
                f'      <text id="{rev_id}" bytes="{size}" />',
                "    </revision>",
            ]
        lines.append("  </page>")
    lines.append("</mediawiki>")
    return "\n".join(lines) + "\n"


def main():
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    revs = edits(random.Random(20100601))
    (out / "wiki12.xml").write_text(render(revs), encoding="utf-8")
    (out / "wiki12_barnstars.txt").write_text("\n".join(BARNSTARS) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
