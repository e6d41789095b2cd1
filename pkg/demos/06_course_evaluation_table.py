"""
A table of questionnaire items
==============================

Runs the command line tool on a course-evaluation file with 28 Likert items
and reports which items depend on the rated difficulty, as a two-column table
of item and selective p-value.

Pass the path of the public course-evaluation CSV (columns instr, class,
nb.repeat, attendance, difficulty, Q1..Q28) as the first argument. Without
one, a synthetic file with the same layout is used. P-values depend on the
seed and are not expected to match published figures.
"""
import sys
import tempfile
from pathlib import Path

from click.testing import CliRunner

from hsicinf.cli import main

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from turkiye_like import ID_COLUMNS, write_turkiye_like  # noqa: E402

with tempfile.TemporaryDirectory() as tmp:
    if len(sys.argv) > 1:
        path = sys.argv[1]
    else:
        path = Path(tmp) / "course_evaluation_like.csv"
        write_turkiye_like(path)
        print("no file given; using a synthetic file with the same layout\n")
    result = CliRunner().invoke(main, [
        "infer", str(path), "--response", "difficulty", "--exclude", ",".join(ID_COLUMNS),
        "--k", "10", "--block-size", "10", "--y-kernel", "gaussian", "--seed", "0",
        "--out-dir", str(Path(tmp) / "report"),
    ])
    print(result.output)
    sys.exit(result.exit_code)
