import json

import pytest

from tenrank.decompositions import decompose_l, verify_decomposition
from tenrank.degeneration import canonical_chain_maps, eps_decomposition
from tenrank.errors import BadSpec, ScalarParseError
from tenrank.families import l_state, m_state, w_state
from tenrank.serialize import (
    decomposition_from_obj,
    decomposition_to_obj,
    dumps,
    map_from_obj,
    map_to_obj,
    tensor_digest,
    tensor_from_obj,
    tensor_to_obj,
)
from tenrank.tensor import build_tensor


def test_tensor_roundtrip_and_order():
    t = m_state(4, 3)
    obj = tensor_to_obj(t)
    assert obj["scalar"] == "cyc"
    idxs = [e["idx"] for e in obj["entries"]]
    assert idxs == sorted(idxs)
    assert tensor_from_obj(json.loads(dumps(obj))) == t


def test_eps_tensor_roundtrip():
    from tenrank.scalars import parse_scalar

    t = build_tensor((2, 2), [((0, 1), parse_scalar("e^-2+z3")), ((1, 0), parse_scalar("1/2*e"))])
    assert t.kind == "eps"
    assert tensor_from_obj(tensor_to_obj(t)) == t


def test_decomposition_roundtrip():
    for dec, t in ((decompose_l(3, 3), l_state(3, 3)),):
        back = decomposition_from_obj(json.loads(dumps(decomposition_to_obj(dec))))
        assert verify_decomposition(t, back)
    ed = eps_decomposition("mprime", 4, 3)
    back = decomposition_from_obj(decomposition_to_obj(ed))
    assert [t.scale for t in back.terms] == [t.scale for t in ed.terms]


def test_map_roundtrip():
    m = canonical_chain_maps("L_TO_M", 3, 4)
    assert map_from_obj(map_to_obj(m)) == m


def test_digest_is_content_based():
    a, b = w_state(3), build_tensor((2, 2, 2), [((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1)])
    assert tensor_digest(a) == tensor_digest(b)
    assert tensor_digest(a) != tensor_digest(w_state(4))
    assert tensor_digest(a).startswith("sha256:")


@pytest.mark.parametrize(
    "obj",
    [
        {"shape": [2, 2]},
        {"shape": [2, 2], "entries": [{"idx": [0, 1]}]},
        {"shape": [2, 2], "scalar": "float", "entries": []},
    ],
)
def test_malformed_tensors(obj):
    with pytest.raises(BadSpec):
        tensor_from_obj(obj)


def test_bad_literal():
    with pytest.raises(ScalarParseError):
        tensor_from_obj({"shape": [2], "entries": [{"idx": [0], "val": "1.5"}]})
    with pytest.raises(BadSpec):
        decomposition_from_obj({"shape": [2]})
    with pytest.raises(BadSpec):
        map_from_obj({})
