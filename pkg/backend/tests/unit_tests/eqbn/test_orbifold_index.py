"""Orbifold bookkeeping and twisted index identities."""
import random
from fractions import Fraction

import pytest

from eqbn.exact_linalg import Matrix
from eqbn.orbifold_index import (
    ROTATION,
    SIGN,
    TRIVIAL,
    MonodromyDatum,
    OrbifoldData,
    RamificationProfile,
    SurfaceBundleData,
    base_index,
    complexification_weights,
    degree_from_residues,
    kawasaki_report,
    local_system_degree,
    map_index,
    normal_index,
    orbifoldize_cover,
    partition_conserved,
    random_monodromy_dataset,
    superrigidity_codim,
    twisted_index,
    weight_lift,
)

QUARTER_TURN = Matrix([[0, -1], [1, 0]])


def test_orbifoldize_cover() -> None:
    profile = RamificationProfile(5, ((2, 3), (2, 3), (5,)))
    assert profile.cover_euler_characteristic == 0
    assert profile.cover_genus == 1
    od = orbifoldize_cover(profile)
    assert od.multiplicities == [6, 6, 5]
    assert od.points[0].upstairs == (3, 2)
    assert od.points[2].upstairs == (1,)
    assert partition_conserved(od, 5)


def test_unramified_points_are_dropped() -> None:
    profile = RamificationProfile(2, ((2,), (2,), (1, 1)))
    assert profile.cover_genus == 0
    od = orbifoldize_cover(profile)
    assert [p.point_id for p in od.points] == [0, 1]


def test_profile_validation() -> None:
    with pytest.raises(ValueError):
        RamificationProfile(2, ((2,),))
    with pytest.raises(ValueError):
        RamificationProfile(3, ((2, 2),))


@pytest.mark.parametrize(
    "genus, rank, degree, expected", [(0, 1, 0, 2), (1, 1, 0, 0), (2, 2, 3, 2)]
)
def test_base_index(genus: int, rank: int, degree: int, expected: int) -> None:
    assert base_index(SurfaceBundleData(genus, rank, degree)) == expected


def test_twisted_index() -> None:
    od = OrbifoldData.from_multiplicities([2])
    sign = MonodromyDatum.from_blocks(2, [(SIGN, 0)])
    assert twisted_index(SurfaceBundleData(0, 1, 0), od, [sign]) == 1
    two = OrbifoldData.from_multiplicities([2, 2])
    assert twisted_index(SurfaceBundleData(0, 2, -2), two, [sign, sign]) == -4


def test_twisted_index_validation() -> None:
    sd = SurfaceBundleData(0, 1, 0)
    od = OrbifoldData.from_multiplicities([2, 3])
    with pytest.raises(ValueError):
        twisted_index(sd, od, [MonodromyDatum.from_blocks(2, [(SIGN, 0)])] * 2)
    mixed = [
        MonodromyDatum.from_blocks(2, [(SIGN, 0)]),
        MonodromyDatum.from_blocks(3, [(ROTATION, 1)]),
    ]
    with pytest.raises(ValueError):
        twisted_index(sd, od, mixed)


def test_weight_lift() -> None:
    assert weight_lift(1, 4) == -3
    assert weight_lift(-1, 4) == -1
    assert weight_lift(0, 5) == 0


def test_complexification_weights() -> None:
    rot = MonodromyDatum.from_blocks(4, [(ROTATION, 1)])
    assert complexification_weights(4, rot) == [-3, -1]
    assert complexification_weights(4, MonodromyDatum.from_matrix(4, QUARTER_TURN)) == [-3, -1]
    assert complexification_weights(2, MonodromyDatum.from_blocks(2, [(SIGN, 0)])) == [-1]
    assert complexification_weights(3, MonodromyDatum.from_blocks(3, [(TRIVIAL, 0)])) == [0]


def test_matrix_datum_fixed_dim() -> None:
    datum = MonodromyDatum.from_matrix(2, Matrix([[1, 0], [0, -1]]))
    assert datum.fixed_dim == 1
    assert datum.coinvariant_dim == 1


def test_local_system_degree() -> None:
    sign = MonodromyDatum.from_blocks(2, [(SIGN, 0)])
    assert local_system_degree(OrbifoldData.from_multiplicities([2, 2]), [sign, sign]) == 1
    rot = MonodromyDatum.from_blocks(4, [(ROTATION, 1)])
    assert local_system_degree(OrbifoldData.from_multiplicities([4]), [rot]) == 1
    od = OrbifoldData.from_multiplicities([3])
    assert degree_from_residues(od, [[-1]]) == Fraction(1, 3)


def test_monodromy_validation() -> None:
    with pytest.raises(ValueError):
        MonodromyDatum.from_blocks(3, [(SIGN, 0)])
    with pytest.raises(ValueError):
        MonodromyDatum.from_matrix(3, Matrix.identity(2))
    with pytest.raises(ValueError):
        MonodromyDatum.from_matrix(2, QUARTER_TURN)
    with pytest.raises(ValueError):
        degree_from_residues(OrbifoldData.from_multiplicities([2]), [[1]])


def test_kawasaki_agrees_on_random_data() -> None:
    rng = random.Random("kawasaki")
    for _ in range(50):
        sd, od, m = random_monodromy_dataset(rng)
        report = kawasaki_report(sd, od, m)
        assert report["agree"], report
        assert report["degree_identity_holds"], report


def test_map_and_normal_index() -> None:
    assert map_index(4, 0, 1) == 4
    assert map_index(3, 2, 5) == 10
    assert normal_index(0, 3) == -6
    with pytest.raises(ValueError):
        map_index(2, 0, 1)


def test_superrigidity_top_stratum() -> None:
    report = superrigidity_codim(3, 2, [1], [1], [-4])
    assert report["codim"] == 5
    assert report["hypothesis_holds"]
    assert report["meets_bound_n"] and report["meets_bound_2s"]
    assert report["summands"] == [
        {"alpha": 0, "term": 5, "index_in_range": True, "meets_bound": True}
    ]
    assert report["top_stratum"] and report["top_shape"]


def test_superrigidity_bounds() -> None:
    report = superrigidity_codim(4, 1, [1], [1], [-3])
    assert report["codim"] == 4
    assert report["bound_n"] == 4
    assert report["meets_bound_n"] and report["meets_bound_2s"]
    assert not report["top_stratum"]
    empty = superrigidity_codim(3, 1, [1, 2], [0, 0], [0, 5])
    assert empty["codim"] == 0
    assert empty["summands"] == []
    assert empty["meets_bound_n"] and not empty["top_stratum"]


def test_superrigidity_index_out_of_range() -> None:
    """i = −1 > −(n−1)s leaves the codimension below both bounds."""
    report = superrigidity_codim(3, 1, [1], [1], [-1])
    assert report["codim"] == 2
    assert not report["hypothesis_holds"]
    assert not report["summands"][0]["meets_bound"]
    assert not report["meets_bound_n"]
    assert not report["meets_bound_2s"]


def test_superrigidity_mixed_summands() -> None:
    report = superrigidity_codim(3, 1, [1, 2], [1, 1], [-2, 0])
    assert report["codim"] == 3 + 2
    assert not report["hypothesis_holds"]
    assert [x["index_in_range"] for x in report["summands"]] == [True, False]
    assert [x["meets_bound"] for x in report["summands"]] == [True, False]
    assert report["meets_bound_n"]


def test_superrigidity_rejects_bad_ledgers() -> None:
    with pytest.raises(ValueError):
        superrigidity_codim(3, 1, [3], [1], [-2])
    with pytest.raises(ValueError):
        superrigidity_codim(3, 1, [1, 1], [1], [-2])
    with pytest.raises(ValueError):
        superrigidity_codim(3, 1, [1], [-1], [-2])
