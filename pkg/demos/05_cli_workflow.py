"""
The same study, driven entirely through the CLI
===============================================

Everything the library does is reachable from the `gendebias` command.
This script materializes the synthetic fixture as plain files in a temp
directory, then shells out: audit -> mitigate -> audit again ->
export-projections, printing each command before running it.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from gendebias import lexicon_to_json_dict, save_text_embeddings
from gendebias.synthetic import planted_fixture

fixture = planted_fixture(seed=0)


def run(*args):
    cmd = [sys.executable, "-m", "gendebias.cli", *args]
    print("$ gendebias " + " ".join(args))
    res = subprocess.run(cmd, capture_output=True, text=True)
    for line in res.stdout.splitlines():
        print("  " + line)
    if res.returncode != 0:
        print(res.stderr, file=sys.stderr)
        raise SystemExit(res.returncode)


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    save_text_embeddings(fixture.source, root / "src.vec")
    save_text_embeddings(fixture.english, root / "en.vec")
    (root / "lex.json").write_text(
        json.dumps(lexicon_to_json_dict(fixture.lexicon)), encoding="utf-8")
    (root / "lex_en.json").write_text(
        json.dumps(lexicon_to_json_dict(fixture.english_lexicon)),
        encoding="utf-8")
    (root / "seed.tsv").write_text(
        "\n".join(f"{s}\t{t}" for s, t in fixture.seed_dictionary.pairs()) + "\n",
        encoding="utf-8")

    run("audit", "--embeddings", str(root / "src.vec"),
        "--lexicon", str(root / "lex.json"),
        "--n-perm", "2000", "--out", str(root / "audit_pre.json"))

    run("mitigate", "--method", "hybrid_ori",
        "--embeddings", str(root / "src.vec"),
        "--embeddings-en", str(root / "en.vec"),
        "--lexicon", str(root / "lex.json"),
        "--lexicon-en", str(root / "lex_en.json"),
        "--seed-dict", str(root / "seed.tsv"),
        "--out", str(root / "mitigated"))

    run("audit", "--embeddings", str(root / "mitigated" / "source.vec"),
        "--lexicon", str(root / "lex.json"),
        "--n-perm", "2000", "--out", str(root / "audit_post.json"))

    run("export-projections", "--embeddings", str(root / "src.vec"),
        "--lexicon", str(root / "lex.json"),
        "--out", str(root / "projections.csv"))

    pre = json.loads((root / "audit_pre.json").read_text())["report"]
    post = json.loads((root / "audit_post.json").read_text())["report"]
    print(f"\nstatistic {pre['statistic']:.4f} -> {post['statistic']:.4f}, "
          f"p-value {pre['p_value']:.4f} -> {post['p_value']:.4f}")

    head = (root / "projections.csv").read_text().splitlines()[:4]
    print("\nprojections.csv starts with:")
    for line in head:
        print("  " + line)
