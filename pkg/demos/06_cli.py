# The command-line tool, driven from Python so the demo runs anywhere the
# package is installed.  Exit code 0 means certified, 2 a negative or
# inconclusive verdict, 1 a usage error.
import json
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "qirigid", *args], capture_output=True, text=True)
    print("$ qirigid", " ".join(args), f"   [exit {proc.returncode}]")
    print((proc.stdout or proc.stderr).rstrip())
    return proc.returncode


with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp)
    run("growth", "--group", "grid_2", "--radius", "6", "--out", str(out))
    run("ends", "--group", "free:2", "--radius", "5", "--inner", "1", "--out", str(out))
    run("certify", "--group", "dihedral_inf", "--qi", "default", "--out", str(out))
    print("files:", sorted(p.name for p in out.iterdir()))

    # a config file supplies defaults; flags win
    cfg = out / "run.json"
    cfg.write_text(json.dumps({"group": "int_gens:2,3", "radius": 12}))
    run("flow-detect", "--config", str(cfg), "--out", str(out))

    run("flow-detect", "--group", "free:2", "--out", str(out))
    run("certify", "--group", "int_gens:1")
