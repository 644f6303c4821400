import numpy as np
import pytest

from endotriv import modules as m
from endotriv.errors import ValidationError
from endotriv.gf import get_field
from endotriv.gog import (AmalgamSpec, HnnSpec, align_representatives, c_module, components,
                          e_module, inflate, inflation_map, is_endotrivial_gog, t_amalgam, t_hnn)
from endotriv.groups import Embedding, Homomorphism, cyclic, quaternion
from endotriv.io import Loader
from endotriv.stable import is_endotrivial, omega
from endotriv.tgroup import t_group

F2, F3, F4, F9 = get_field(2), get_field(3), get_field((2, 2)), get_field((3, 2))


def spec(name, field=None):
    return Loader(field).load(name)[1]


def amalgam(nA, nC, nB, F, wa, wb):
    A, B, C = cyclic(nA), cyclic(nB), cyclic(nC)
    return AmalgamSpec(A, B, C, Embedding(C, A, [wa]), Embedding(C, B, [wb]), F)


def test_spec_validation():
    A, C = cyclic(4), cyclic(2)
    with pytest.raises(ValidationError):
        AmalgamSpec(A, A, C, Homomorphism(C, A, [""]), Embedding(C, A, ["g g"]), F2)
    H, T = cyclic(3), cyclic(1)
    HnnSpec(H, T, Embedding(T, H, []), Embedding(T, H, []), F3)
    with pytest.raises(ValidationError):
        HnnSpec(H, H, Embedding(H, H, ["g"]), Homomorphism(H, H, [""]), F3)


def test_c_module_examples():
    S = amalgam(9, 3, 9, F3, "g g g", "g g g")
    kA, kB = m.trivial(S.A, F3), m.trivial(S.B, F3)
    X = c_module(S, kA, kB, [[2]])
    assert X.restrict_A().gens[0].tolist() == [[1]]
    assert X.restrict_B().gens[0].tolist() == [[1]]
    assert is_endotrivial_gog(X)
    # equivariance violation names the offending generator
    OmA = omega(kA, 1).representative
    with pytest.raises(ValidationError, match="edge generator 'g'"):
        c_module(S, OmA, omega(kB, 1).representative, np.roll(np.eye(8, dtype=np.int64), 1, 0))
    with pytest.raises(ValidationError):
        c_module(S, OmA, m.direct_sum(omega(kB, 1).representative, kB), np.eye(8, dtype=np.int64))


def test_delta_is_multiplicative():
    S = amalgam(4, 2, 4, F4, "g g", "g g")
    kA, kB = m.trivial(S.A, F4), m.trivial(S.B, F4)
    for lam in range(1, 4):
        for mu in range(1, 4):
            X = c_module(S, kA, kB, [[lam]]).tensor(c_module(S, kA, kB, [[mu]]))
            assert X.phi.tolist() == [[int(F4.mul[lam, mu])]]


def test_e_module_examples():
    S = spec("c3_times_z")
    F = S.field
    k = m.trivial(S.H, F)
    for lam in range(1, F.q):
        X = e_module(S, k, [[lam]])
        assert X.restrict_H().gens[0].tolist() == [[1]] and X.t_matrix.tolist() == [[lam]]
    Om = omega(k, 1).representative
    X = e_module(S, Om, np.eye(Om.dim, dtype=np.int64))
    T, Ti = X.t_matrix, F.inverse(X.t_matrix)
    for a in range(len(S.A)):
        Ma = restrict_elem(Om, S.incl.element_map[a])
        Mfa = restrict_elem(Om, S.f.element_map[a])
        assert np.array_equal(F.matmul(T, F.matmul(Ma, Ti)), Mfa)


def restrict_elem(M, x):
    return M.elements[int(x)]


def test_align_representatives():
    S = amalgam(9, 3, 9, F3, "g g g", "g g g")
    kA, kB = m.trivial(S.A, F3), m.trivial(S.B, F3)
    X = align_representatives(S, kA, kB, phi_stable=[[2]])
    assert X.dim == 1 and X.phi.tolist() == [[2]]
    M = m.direct_sum(kA, m.free_module(S.A, F3, 1))
    X = align_representatives(S, M, kB)
    assert X.dim == 10 and X.N.dim == 10
    OmA, OmB = omega(kA, 1).representative, omega(kB, 1).representative
    X = align_representatives(S, OmA, OmB)
    assert X.dim == 8 and is_endotrivial_gog(X)
    with pytest.raises(ValidationError):
        align_representatives(S, OmA, kB)


def test_t_amalgam_examples():
    S = spec("sl2z")
    assert t_amalgam(S).T == "Z/2"
    assert t_amalgam(spec("sl2z", (2, 2))).T == "Z/6"
    assert t_amalgam(spec("c9_c3_c9")).T == "Z/2"
    r = t_amalgam(spec("c3_free_c3"))
    assert r.T == "Z/2 ⊕ Z/2" and all(r.audit.values())


def test_t_amalgam_oracle_mode():
    S = spec("c9_c3_c9")
    from endotriv.fgab import FgAbGroup
    Z2 = FgAbGroup(1, [[2]])
    orc = {"T_A": Z2, "T_B": Z2, "T_C": Z2, "res_A": [[1]], "res_B": [[1]]}
    r = t_amalgam(S, orc)
    assert r.T == "Z/2" and any("[oracle]" in d for d in r.derivation)
    with pytest.raises(ValidationError):
        t_amalgam(S, {"T_A": Z2, "T_C": Z2})


def test_t_hnn_examples():
    r = t_hnn(spec("c3_times_z"))
    ext = r.extension
    assert ext.sub.canonical_string() == "Z/8" and ext.quotient.canonical_string() == "Z/2"
    assert ext.resolved.canonical_string() == "Z/2 ⊕ Z/8"
    assert "inflation retraction" in ext.split_reason
    r = t_hnn(spec("c3_free_z"))
    assert r.T == "Z/2"
    assert any(d.startswith("ker(res^G_H) = im δ = 0") for d in r.derivation)
    assert t_hnn(spec("c2_times_z")).T == "0"


def test_t_hnn_unresolved_extension():
    # H = C_3 x C_3 with A = C_3 sent to two different factors: no retraction applies
    from endotriv.groups import direct_product
    H = direct_product(cyclic(3, "a"), cyclic(3, "b"))
    A = cyclic(3)
    S = HnnSpec(H, A, Embedding(A, H, ["a"]), Embedding(A, H, ["b"]), F3)
    r = t_hnn(S)
    ext = r.extension
    assert all(r.audit.values())
    if ext.sub.is_trivial() or ext.quotient.is_trivial():
        assert r.value is not None
    else:
        assert ext.resolved is None and r.value is None


def test_components_examples():
    assert components(spec("c3_free_c3")).count == 2
    assert components(spec("c9_c3_c9")).count == 1
    assert components(spec("sl2z")).count == 1
    S = amalgam(9, 3, 9, F3, "g g g", "g g g")
    assert components(S).count == 1


def test_components_symmetry():
    for name in ("sl2z", "c9_c3_c9", "c4_c2_c4", "c3_free_c3"):
        S = spec(name)
        swapped = AmalgamSpec(S.B, S.A, S.C, S.embed_B, S.embed_A, S.field)
        assert components(swapped).count == components(S).count
        # same subgroup data through a conjugate copy: compose embed_A with an automorphism
        A = S.A
        if A.ngens == 1 and len(A) > 2:
            unit = next(u for u in range(2, len(A)) if np.gcd(u, len(A)) == 1)
            auto = Embedding(A, A, [" ".join(["g"] * unit)])
            eA = Embedding(S.C, A, [int(auto.element_map[x]) for x in S.embed_A.images])
            twisted = AmalgamSpec(A, S.B, S.C, eA, S.embed_B, S.field)
            assert components(twisted).count == components(S).count


def test_inflate_examples():
    data = Loader().load("c4c2c4_to_q8")[1]
    S, Q, maps = data["spec"], data["Q"], data["maps"]
    Om = omega(m.trivial(Q, F2), 1).representative
    X = inflate(S, maps, Om)
    assert np.array_equal(X.M.gens[0], Om.elements[maps[0].images[0]])
    assert X.phi.tolist() == np.eye(7, dtype=np.int64).tolist()
    k = inflate(S, maps, m.trivial(Q, F2))
    assert k.dim == 1 and k.phi.tolist() == [[1]]
    im = inflation_map(S, maps, t_group(Q, F2))
    assert im.to_vertices.images == [[1], [1]]
    assert im.kernel.canonical_string() == "Z/2"


def test_inflate_edge_disagreement():
    S = spec("c4_c2_c4")
    Q = quaternion()
    fA = Homomorphism(S.A, Q, ["i"])
    inflate(S, (fA, Homomorphism(S.B, Q, ["j"])), m.trivial(Q, F2))
    # the trivial map on B sends the edge group to 1, but fA sends it to -1
    with pytest.raises(ValidationError, match="disagree"):
        inflate(S, (fA, Homomorphism(S.B, Q, [""])), m.trivial(Q, F2))


def test_inflate_preserves_endotriviality():
    data = Loader().load("c4c2c4_to_q8")[1]
    S, Q, maps = data["spec"], data["Q"], data["maps"]
    k = m.trivial(Q, F2)
    mods = [k, omega(k, 1).representative, omega(k, 2).representative,
            m.direct_sum(k, k), m.regular(Q, F2), m.direct_sum(k, omega(k, 1).representative)]
    for M in mods:
        assert is_endotrivial_gog(inflate(S, maps, M)) == is_endotrivial(M)


def test_inflate_hnn():
    S = spec("c3_times_z")
    F = S.field
    H = S.H
    M = omega(m.trivial(H, F), 1).representative
    X = inflate(S, Embedding(H, H, ["g"]), M, t_image=0)
    assert X.t_matrix.tolist() == np.eye(M.dim, dtype=np.int64).tolist()
    with pytest.raises(ValidationError):
        inflate(S, Embedding(H, H, ["g"]), M)
