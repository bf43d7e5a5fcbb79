# The benchmark harness end to end: write the vendored benchmark instance
# to disk, sweep two methods over seeds through the CLI, aggregate, and
# check the sublinear certificate on the resulting traces.
#
# The same flow scales to the full method suite; see README for the
# benchmark-scale numbers and the plots package for figures.

import pathlib
import subprocess
import sys
import tempfile

from fwbench import L1Ball, metrics, synth_dataset, to_libsvm

workdir = pathlib.Path(tempfile.mkdtemp(prefix="fwbench_demo_"))
data = workdir / "train.txt"
ds = synth_dataset(n=400, p=30, density=0.2, loss="logistic", seed=21)
data.write_text(to_libsvm(ds))
print("instance written to", data)


def cli(*args):
    cmd = [sys.executable, "-m", "fwbench", *args]
    print("\n$", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)


cli("sweep", "--algos", "gsfw,fw", "--seeds", "1,2,3",
    "--data", str(data), "--loss", "logistic", "--reg", "l1ball",
    "--delta", "2", "--batch", "0.01",
    "--iters", "4000", "--eval-stride", "500",
    "--outdir", str(workdir))

M = L1Ball(2.0).max_abs_prediction(ds)
n_eff = -(-ds.n // 4)  # ceil(n / batch size)
cli("check-bounds",
    str(workdir / "gsfw_seed1.csv"), str(workdir / "gsfw_seed2.csv"),
    str(workdir / "gsfw_seed3.csv"),
    "--mode", "nonstrong", "--n-eff", str(n_eff), "--gamma", "0.25",
    "--pred-bound", str(M),
    "--radius", str(metrics.bregman_radius_logistic()),
    "--report-out", str(workdir / "bounds.csv"))

cli("equivalence", "--n", "20", "--p", "5", "--iters", "300", "--seeds", "1,2")

print("\nartifacts in", workdir)
for p in sorted(workdir.iterdir()):
    print("  ", p.name)
