"""Quick end-to-end check of the Python bindings."""

import permres

f7 = permres.Group("gf:7")
sq = f7.poly("x^2")
assert sq.values == [0, 1, 4, 2, 2, 4, 1]
assert sq.image_size == 4

stats = permres.analyze(sq)
assert (stats["v"], stats["u"], stats["delta"]) == (4, 2, 1)

cert = permres.pres(permres.Group.field(5).poly("x^2 - x^3"))
assert cert["pres"] == 3 and cert["verified"]
shift = permres.Function(permres.Group.field(5), cert["g"])
assert (shift + permres.Group.field(5).poly("x^2 - x^3")).is_permutation()

cube = f7.poly("x^3")
assert permres.pres(cube, jobs=2)["pres"] == permres.pres_oracle(cube) == 3

limited = permres.pres(permres.Group("gf:11").poly("x^2"), max_sets=2)
assert limited["status"] == "bound-limited"

qc = permres.family("quadchar:7")
assert qc["witness_shifts"] == [0, 3, 4] and qc["predicted_pres"] == 3

phi = f7.permutation("(2 3 4 5)")
assert permres.pres(phi.compose(sq))["pres"] == 2
moved = permres.affine_transform(sq, (3, 1), (2, 5))
assert permres.pres(moved)["pres"] == permres.pres(sq)["pres"]

g = permres.upper_bound_witness(sq)
assert (g + sq).is_permutation()

report = permres.pipeline(sq, cap=10)
assert report["pres"] == 3 and len(report["candidates"]) <= 10

z = permres.Group.cyclic([2, 4])
assert z.order == 8 and not z.is_field

try:
    permres.Group("gf:6")
except ValueError:
    pass
else:
    raise AssertionError("gf:6 accepted")

print("smoke test ok")
