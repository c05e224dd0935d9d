import numpy as np
import pytest

from cartansim import ConfigError, check_hamiltonian_in_m, to_dense
from cartansim.models import (
    MODEL_NAMES,
    ModelSpec,
    build_model,
    default_benchmark_specs,
)
from oracles import dense_sum


def labels_of(element):
    return {p.label: c for p, c in element.sorted_terms()}


# ------------------------------------------------------------- construction

def test_tfim_two_sites():
    h = build_model(ModelSpec("tfim", 2))
    assert labels_of(h) == {"XX": 1.0, "ZI": 1.0, "IZ": 1.0}


def test_xy_two_sites():
    h = build_model(ModelSpec("xy", 2))
    assert labels_of(h) == {"XX": 1.0, "YY": 1.0}


def test_tfxy_is_xy_plus_field():
    h = build_model(ModelSpec("tfxy", 2))
    assert labels_of(h) == {"XX": 1.0, "YY": 1.0, "ZI": 1.0, "IZ": 1.0}


def test_heisenberg_two_sites():
    h = build_model(ModelSpec("heisenberg", 2))
    assert labels_of(h) == {"XX": 1.0, "YY": 1.0, "ZZ": 1.0}


def test_kitaev_alternation():
    h = build_model(ModelSpec("kitaev_odd", 3))
    assert labels_of(h) == {"XXI": 1.0, "IYY": 1.0}
    h4 = build_model(ModelSpec("kitaev_even", 4))
    assert labels_of(h4) == {"XXII": 1.0, "IYYI": 1.0, "IIXX": 1.0}


def test_tfim_chain_has_expected_counts():
    h = build_model(ModelSpec("tfim", 5))
    labs = labels_of(h)
    assert sum(1 for l in labs if "X" in l) == 4  # bonds
    assert sum(1 for l in labs if "Z" in l) == 5  # sites


def test_periodic_adds_wrap_bond():
    open_h = build_model(ModelSpec("xy", 4))
    per_h = build_model(ModelSpec("xy", 4, boundary="periodic"))
    extra = set(labels_of(per_h)) - set(labels_of(open_h))
    assert extra == {"XIIX", "YIIY"}


# ---------------------------------------------------------------- couplings

def test_scalar_coupling_broadcasts():
    h = build_model(ModelSpec("tfim", 3, couplings={"J": 2.0, "h": -0.5}))
    labs = labels_of(h)
    assert labs["XXI"] == 2.0 and labs["IXX"] == 2.0
    assert labs["ZII"] == -0.5 and labs["IZI"] == -0.5 and labs["IIZ"] == -0.5


def test_sequence_coupling_per_bond():
    h = build_model(ModelSpec("xy", 3, couplings={"J": [1.0, 3.0]}))
    labs = labels_of(h)
    assert labs["XXI"] == 1.0 and labs["IXX"] == 3.0
    assert labs["YYI"] == 1.0 and labs["IYY"] == 3.0


def test_sequence_length_mismatch():
    with pytest.raises(ConfigError, match="needs 2 values"):
        build_model(ModelSpec("xy", 3, couplings={"J": [1.0, 2.0, 3.0]}))


def test_unknown_coupling_key():
    with pytest.raises(ConfigError, match="takes couplings"):
        ModelSpec("xy", 3, couplings={"h": 1.0})


# --------------------------------------------------------------- validation

def test_unknown_model_name():
    with pytest.raises(ConfigError, match="unknown model"):
        ModelSpec("ising", 4)


def test_size_bounds():
    with pytest.raises(ConfigError):
        ModelSpec("tfim", 1)
    with pytest.raises(ConfigError):
        ModelSpec("tfim", 11)


def test_kitaev_parity_constraints():
    with pytest.raises(ConfigError, match="even"):
        ModelSpec("kitaev_even", 3)
    with pytest.raises(ConfigError, match="odd"):
        ModelSpec("kitaev_odd", 4)


def test_bad_boundary():
    with pytest.raises(ConfigError, match="boundary"):
        ModelSpec("tfim", 3, boundary="twisted")


# ----------------------------------------------------------------- structure

def test_all_models_land_in_minus_eigenspace():
    # even Y count per term is what the transpose involution requires of H
    for spec in default_benchmark_specs():
        h = build_model(spec)
        check_hamiltonian_in_m(h)  # raises on violation


def test_all_terms_are_at_most_two_local():
    for spec in default_benchmark_specs():
        for p, _ in build_model(spec).sorted_terms():
            assert p.weight in (1, 2)
            if p.weight == 2:
                # nonidentity sites are adjacent (possibly wrapping)
                sites = [i for i in range(p.n) if (p.x >> i | p.z >> i) & 1]
                a, b = sites
                assert b - a == 1 or (a == 0 and b == p.n - 1)


def test_models_are_hermitian_dense():
    for spec in default_benchmark_specs():
        m = to_dense(build_model(spec))
        assert np.max(np.abs(m - m.conj().T)) == 0.0


def test_dense_agrees_with_label_oracle():
    h = build_model(ModelSpec("heisenberg", 3, couplings={"J": [0.7, -0.2]}))
    ref = dense_sum(labels_of(h))
    assert np.max(np.abs(to_dense(h) - ref)) < 1e-14


def test_benchmark_specs_cover_all_models():
    assert tuple(s.name for s in default_benchmark_specs()) == MODEL_NAMES


def test_spec_dict_roundtrip():
    spec = ModelSpec("xy", 5, couplings={"J": [1, 2, 3, 4]}, boundary="open")
    again = ModelSpec.from_dict(spec.to_dict())
    assert build_model(again) == build_model(spec)
    assert ModelSpec.from_dict(ModelSpec("tfim", 2).to_dict()) == ModelSpec("tfim", 2)
