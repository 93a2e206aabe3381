"""Smoke test for the mrlrc_py extension.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`.
"""

import mrlrc_py as m

f = m.Field(5, 3)
a, b = 7, 42
assert f.mul(a, f.inv(a)) == 1
assert f.frobenius(f.mul(a, b)) == f.mul(f.frobenius(a), f.frobenius(b))
assert f.frobenius(a, 3) == a

code = m.MrLrc(5, 3, 3, 3, 3, 7)
assert (code.h, code.total_nodes) == (2, 15)
cw = code.encode([1, 2, 3, 4, 5, 6, 7])
assert len(cw) == 15
block = code.local_decode(1, [(0, cw[0]), (3, cw[3]), (4, cw[4])])
assert block == cw[:5]

small = m.MrLrc(5, 2, 2, 2, 2, 3)
assert small.is_maximally_recoverable()

assert m.secrecy_dim_direct(3, 3, 2, 7, 1, 1, [3, 1, 0]) == 1
assert m.secrecy_dim_forwarded(3, 3, 2, 7, 1, [3], [2, 3, 1], [0, 1, 3]) == 1
rows = m.sweep(7, 3, 0, 1, 1, 15)
assert rows[4] == (5, 32, 16, 22, 28)
assert rows[14] == (15, 102, 56, 92, 98)

with open(__file__.rsplit("/", 2)[0] + "/configs/example1_direct.toml") as fh:
    scenario = m.Scenario.from_toml(fh.read())
result = scenario.simulate()
assert result["oracle_k_e"] == 6 and result["formula_direct"] == 6
assert scenario.analyze(result["transcript"])["oracle_k_e"] == 6

try:
    m.Scenario.from_toml("[field]\nq = 4\nm = 2\n")
except ValueError as exc:
    print("config error as expected:", exc)
else:
    raise AssertionError("bad config accepted")

print("smoke test passed")
