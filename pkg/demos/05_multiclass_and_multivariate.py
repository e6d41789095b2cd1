"""
Class labels and vector outputs
===============================

The output kernel decides what "dependence" means. Class labels use the delta
kernel (1 when two labels agree), vector outputs a Gaussian kernel with the
median distance as bandwidth. Everything downstream is unchanged.
"""
from hsicinf import PipelineConfig, run, synthdata

# three classes separated along x1 and x2 only
data = synthdata.generate("threeclass", 3000, seed=11)
report = run(data, PipelineConfig(seed=1))
print("three-class, kernel", report.kernel_y)
for r in report.rows[:4]:
    print(f"  {r.name:<4} p={r.p_value:.4f}{'  *' if r.reject else ''}")

# three outputs driven by x1..x4
data = synthdata.generate("multivariate", 3000, seed=12)
report = run(data, PipelineConfig(seed=1))
print("multivariate, kernel", report.kernel_y)
for r in report.rows[:6]:
    print(f"  {r.name:<4} p={r.p_value:.4f}{'  *' if r.reject else ''}")
