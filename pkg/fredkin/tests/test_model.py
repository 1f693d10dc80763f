import io

import numpy as np
import pytest

from fredkin.combinatorics import ColoredSpinWord, SpinWord
from fredkin.config import CapExceeded
from fredkin.model import (
    BoundarySpec,
    DimensionMismatch,
    ModelForm,
    Operator,
    SiteOutOfRange,
    apply,
    build_bulk_term,
    build_colored_hamiltonian,
    build_hamiltonian,
    build_xxx_hamiltonian,
    check_form_equivalence,
    color_permutation,
    dump_operator,
    local_bulk_matrix,
    magnetization,
    permutation_operator,
    restrict,
    sector_indices,
    term_operators,
    translation_permutation,
)
from fredkin.states import colored_dyck_state, dyck_state
from fredkin.tests import fakes


def index(text):
    return SpinWord.parse(text).bits


def kernel_dim(matrix, tol=1e-9):
    return int(np.sum(np.abs(np.linalg.eigvalsh(matrix)) < tol))


@pytest.mark.unit
@pytest.mark.hermetic
class TestBoundarySpec(object):
    def test_parse(self):
        assert BoundarySpec.parse('open') == BoundarySpec.open(1, 1)
        assert BoundarySpec.parse('open:0.5,-2') == ('open', 0.5, -2.0)
        assert BoundarySpec.parse('periodic').is_periodic
        assert BoundarySpec.parse('free').kind == 'free'

    def test_str(self):
        assert str(BoundarySpec.open()) == 'open:1,1'
        assert str(BoundarySpec.open(-0.5, 2)) == 'open:-0.5,2'
        assert str(BoundarySpec.periodic()) == 'periodic'

    def test_parse_rejects(self):
        for text in ['open:1', 'open:a,b', 'periodic:1,1', 'twisted', '']:
            with pytest.raises(ValueError):
                BoundarySpec.parse(text)

    def test_couplings_must_be_finite(self):
        with pytest.raises(ValueError):
            BoundarySpec.open(float('inf'), 1.0)


@pytest.mark.unit
@pytest.mark.hermetic
class TestBulkTerm(object):
    def test_kernel_dimension(self):
        term = build_bulk_term(1, 3).toarray()
        assert kernel_dim(term) == 6
        assert np.allclose(np.linalg.eigvalsh(term)[-2:], [1.0, 1.0])

    def test_matrix_element(self):
        term = build_bulk_term(1, 3).toarray()
        assert term[index('(()'), index('()(')] == pytest.approx(-0.5)
        assert term[index('())'), index(')()')] == pytest.approx(-0.5)

    def test_acts_on_its_window(self):
        result = build_bulk_term(1, 4).dot(np.eye(16)[index('()((')])
        expected = np.zeros(16)
        expected[index('()((')] = 0.5
        expected[index('(()(')] = -0.5
        assert np.allclose(result, expected)

    def test_leaves_other_sites_alone(self):
        term = build_bulk_term(2, 5).toarray()
        assert term[index('((()('), index('(()((')] == pytest.approx(-0.5)
        assert term[index('((()('), index('()(((')] == 0.0

    def test_gate_form_fixes_symmetric_states(self):
        gate = local_bulk_matrix(ModelForm.FREDKIN_GATE)
        symmetric = np.zeros(8)
        symmetric[index('()(')] = symmetric[index('(()')] = 1.0
        assert np.allclose(gate.dot(symmetric), 0.0)

    def test_site_out_of_range(self):
        for j in [0, 3]:
            with pytest.raises(SiteOutOfRange):
                build_bulk_term(j, 4)
        build_bulk_term(4, 4, periodic=True)
        with pytest.raises(SiteOutOfRange):
            build_bulk_term(5, 4, periodic=True)


@pytest.mark.unit
@pytest.mark.hermetic
class TestForms(object):
    def test_ratios(self):
        ratios = check_form_equivalence(3)
        assert ratios == (1.0, 8.0, 2.0)
        assert ratios.pauli == 8.0

    def test_ratios_on_longer_chain(self):
        assert check_form_equivalence(5) == (1.0, 8.0, 2.0)

    def test_same_ground_space(self):
        for form in ModelForm:
            h = build_hamiltonian(6, form=form).toarray()
            assert kernel_dim(h) == 1

    def test_eigenvalues_agree_after_scaling(self):
        for boundary in [BoundarySpec.free(), BoundarySpec.periodic()]:
            reference = np.linalg.eigvalsh(build_hamiltonian(7, boundary).toarray())
            for form, scale in [(ModelForm.PAULI, 8.0), (ModelForm.FREDKIN_GATE, 2.0)]:
                values = np.linalg.eigvalsh(build_hamiltonian(7, boundary, form).toarray())
                assert np.allclose(values / scale, reference, atol=1e-10)

    def test_too_short(self):
        with pytest.raises(SiteOutOfRange):
            check_form_equivalence(2)


@pytest.mark.unit
@pytest.mark.hermetic
class TestHamiltonian(object):
    def test_two_sites_is_boundary_only(self):
        h = build_hamiltonian(2).toarray()
        assert np.allclose(h, np.diag([1.0, 2.0, 0.0, 1.0]))

    def test_open_kernel_is_dyck_state(self):
        for n in [2, 3, 4]:
            h = build_hamiltonian(2 * n).toarray()
            assert kernel_dim(h) == 1
            values, vectors = np.linalg.eigh(h)
            ground = vectors[:, 0]
            assert abs(np.dot(ground, dyck_state(n).amplitudes)) == pytest.approx(1.0)

    def test_dyck_state_is_a_zero_mode(self):
        h = build_hamiltonian(8)
        assert np.abs(h.dot(dyck_state(4).amplitudes)).max() < 1e-12
        for term in term_operators(8):
            assert np.abs(term.dot(dyck_state(4).amplitudes)).max() < 1e-12

    def test_positive_semidefinite(self):
        for boundary in ['open', 'periodic', 'free', 'open:-1,0.5']:
            h = build_hamiltonian(6, BoundarySpec.parse(boundary)).toarray()
            assert np.allclose(h, h.T)
            assert np.linalg.eigvalsh(h).min() >= -1e-10

    def test_periodic_kernel(self):
        h = build_hamiltonian(4, BoundarySpec.periodic()).toarray()
        assert kernel_dim(h) == 6

    def test_too_few_sites(self):
        with pytest.raises(SiteOutOfRange):
            build_hamiltonian(1)
        with pytest.raises(SiteOutOfRange):
            build_hamiltonian(2, BoundarySpec.periodic())
        build_hamiltonian(1, BoundarySpec.free())

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_hamiltonian(10, config=fakes.get_config(basis_cap_bits=8))

    def test_term_count(self):
        assert len(term_operators(6)) == 4 + 2
        assert len(term_operators(6, BoundarySpec.periodic())) == 6

    def test_terms_sum_to_hamiltonian(self):
        total = term_operators(5)[0]
        for term in term_operators(5)[1:]:
            total = total + term
        assert np.allclose(total.toarray(), build_hamiltonian(5).toarray())


@pytest.mark.unit
@pytest.mark.hermetic
class TestMatrixFree(object):
    def test_agrees_with_sparse(self):
        for boundary in [BoundarySpec.open(), BoundarySpec.periodic(),
                         BoundarySpec.open(0.3, -1.5)]:
            sparse_h = build_hamiltonian(7, boundary)
            free_h = build_hamiltonian(7, boundary, matrix_free=True)
            assert free_h.matrix_free and not sparse_h.matrix_free
            for v in fakes.random_vectors(2 ** 7):
                assert np.allclose(free_h.dot(v), sparse_h.dot(v))

    def test_colored_agrees_with_sparse(self):
        sparse_h = build_colored_hamiltonian(3, 2)
        free_h = build_colored_hamiltonian(3, 2, matrix_free=True)
        for v in fakes.random_vectors(4 ** 3, count=3):
            assert np.allclose(free_h.dot(v), sparse_h.dot(v))

    def test_block_of_vectors(self):
        free_h = build_hamiltonian(5, matrix_free=True)
        block = np.column_stack(fakes.random_vectors(32, count=3))
        assert np.allclose(free_h.dot(block), build_hamiltonian(5).toarray().dot(block))

    def test_materializes(self):
        free_h = build_hamiltonian(5, form=ModelForm.PAULI, matrix_free=True)
        assert np.allclose(free_h.toarray(),
                           build_hamiltonian(5, form=ModelForm.PAULI).toarray())

    def test_dimension_mismatch(self):
        for matrix_free in [False, True]:
            with pytest.raises(DimensionMismatch):
                build_hamiltonian(4, matrix_free=matrix_free).dot(np.ones(8))


@pytest.mark.unit
@pytest.mark.hermetic
class TestColored(object):
    def test_single_color_is_uncolored(self):
        for boundary in [BoundarySpec.open(), BoundarySpec.periodic()]:
            colored = build_colored_hamiltonian(5, 1, boundary).toarray()
            assert np.allclose(colored, build_hamiltonian(5, boundary).toarray())

    def test_two_site_singlet(self):
        h = build_colored_hamiltonian(2, 2).toarray()
        assert kernel_dim(h) == 1
        _, vectors = np.linalg.eigh(h)
        up0_down0 = ColoredSpinWord.parse('(0)0', 2).index
        up1_down1 = ColoredSpinWord.parse('(1)1', 2).index
        expected = np.zeros(16)
        expected[[up0_down0, up1_down1]] = 1 / np.sqrt(2)
        assert abs(np.dot(vectors[:, 0], expected)) == pytest.approx(1.0)

    def test_four_sites_two_colors(self):
        h = build_colored_hamiltonian(4, 2)
        assert kernel_dim(h.toarray()) == 1
        state = colored_dyck_state(2, 2)
        assert np.abs(h.dot(state.amplitudes)).max() < 1e-12
        found = sorted(str(ColoredSpinWord.from_index(i, 4, 2)) for i in state.support())
        expected = sorted(str(ColoredSpinWord.from_brackets(w, 2)) for w in fakes.COLORED_DYCK_4)
        assert found == expected

    def test_positive_semidefinite(self):
        h = build_colored_hamiltonian(3, 3).toarray()
        assert np.allclose(h, h.T)
        assert np.linalg.eigvalsh(h).min() >= -1e-10

    def test_color_relabeling_symmetry(self):
        h = build_colored_hamiltonian(3, 3, BoundarySpec.periodic()).toarray()
        p = permutation_operator(color_permutation(3, 3, [2, 0, 1])).toarray()
        assert np.allclose(p.dot(h).dot(p.T), h)

    def test_color_transpositions(self):
        h = build_colored_hamiltonian(4, 3).tocsr()
        for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0]]:
            p = permutation_operator(color_permutation(4, 3, perm)).tocsr()
            assert abs(p.dot(h).dot(p.T) - h).max() < 1e-12

    def test_color_swap_on_longer_periodic_chain(self):
        h = build_colored_hamiltonian(5, 2, BoundarySpec.periodic()).tocsr()
        p = permutation_operator(color_permutation(5, 2, [1, 0])).tocsr()
        assert abs(p.dot(h).dot(p.T) - h).max() < 1e-12

    def test_colored_conserves_magnetization(self):
        z = magnetization(4, 2)
        for boundary in [BoundarySpec.open(), BoundarySpec.periodic()]:
            rows, cols, _ = build_colored_hamiltonian(4, 2, boundary).triplets()
            assert (z[rows] == z[cols]).all()

    def test_one_pair_three_colors(self):
        h = build_colored_hamiltonian(2, 3).toarray()
        assert kernel_dim(h) == 1
        _, vectors = np.linalg.eigh(h)
        state = colored_dyck_state(1, 3)
        assert abs(np.dot(vectors[:, 0], state.amplitudes)) == pytest.approx(1.0)

    def test_bad_color_permutation(self):
        with pytest.raises(ValueError):
            color_permutation(3, 2, [0, 0])

    def test_needs_a_color(self):
        with pytest.raises(ValueError):
            build_colored_hamiltonian(3, 0)


@pytest.mark.unit
@pytest.mark.hermetic
class TestSymmetries(object):
    def test_magnetization(self):
        assert list(magnetization(2)) == [-2, 0, 0, 2]
        assert magnetization(3, 2)[ColoredSpinWord.parse('(1(0)1', 2).index] == 1

    def test_conserves_magnetization(self):
        z = magnetization(7)
        rows, cols, _ = build_hamiltonian(7).triplets()
        assert (z[rows] == z[cols]).all()

    def test_sector_block(self):
        full = build_hamiltonian(6).tocsr()
        for z in [-2, 0, 2]:
            indices = sector_indices(6, z)
            block = build_hamiltonian(6, z_sector=z).toarray()
            assert np.allclose(block, full[indices][:, indices].toarray())
            assert np.allclose(restrict(build_hamiltonian(6), indices).toarray(), block)

    def test_sector_sizes(self):
        assert len(sector_indices(6, 0)) == 20
        assert len(sector_indices(6, 6)) == 1
        assert len(sector_indices(5, 0)) == 0

    def test_translation(self):
        perm = translation_permutation(4)
        assert perm[index('(())')] == index(')(()')
        assert perm[index('((()')] == index(')(((')
        assert perm[index('((((')] == index('((((')

    def test_translation_commutes_with_periodic_hamiltonian(self):
        for n in [5, 6]:
            t = permutation_operator(translation_permutation(n)).toarray()
            h = build_hamiltonian(n, BoundarySpec.periodic()).toarray()
            assert np.allclose(t.dot(h), h.dot(t))

    def test_colored_translation(self):
        t = permutation_operator(translation_permutation(3, 2)).toarray()
        h = build_colored_hamiltonian(3, 2, BoundarySpec.periodic()).toarray()
        assert np.allclose(t.dot(h), h.dot(t))


@pytest.mark.unit
@pytest.mark.hermetic
class TestOperator(object):
    def test_needs_storage(self):
        with pytest.raises(ValueError):
            Operator(4)

    def test_apply(self):
        zero = build_hamiltonian(2) * 0.0
        assert np.allclose(apply(zero, np.ones(4)), 0.0)
        state = dyck_state(2)
        assert np.abs(apply(build_hamiltonian(4), state).amplitudes).max() < 1e-12
        assert apply(build_hamiltonian(4), state).n_sites == 4

    def test_arithmetic(self):
        h = build_hamiltonian(4)
        assert np.allclose((2 * h).toarray(), 2 * h.toarray())
        assert np.allclose((h + h).toarray(), (h * 2).toarray())

    def test_linear_operator(self):
        h = build_hamiltonian(5, matrix_free=True)
        v = fakes.random_vectors(32, count=1)[0]
        assert np.allclose(h.as_linear_operator().matvec(v), h.dot(v))

    def test_triplets_sorted(self):
        rows, cols, values = build_hamiltonian(5).triplets()
        keys = list(zip(rows, cols))
        assert keys == sorted(keys)
        assert (values != 0).all()


@pytest.mark.unit
@pytest.mark.hermetic
class TestXXX(object):
    def test_ferromagnetic_ground_space(self):
        for periodic in [False, True]:
            h = build_xxx_hamiltonian(5, periodic).toarray()
            assert kernel_dim(h) == 6

    def test_periodic_fredkin_kernel_holds_xxx_ground_states(self):
        # odd periodic chains: each magnetization sector is a single orbit
        xxx = build_xxx_hamiltonian(5, periodic=True)
        fredkin = build_hamiltonian(5, BoundarySpec.periodic())
        for z in [-5, -3, -1, 1, 3, 5]:
            v = np.zeros(32)
            v[sector_indices(5, z)] = 1.0
            assert np.abs(xxx.dot(v)).max() < 1e-12
            assert np.abs(fredkin.dot(v)).max() < 1e-12


@pytest.mark.unit
@pytest.mark.hermetic
def test_dump_operator():
    out = io.StringIO()
    dump_operator(build_hamiltonian(2), out)
    assert out.getvalue() == '0 0 1\n1 1 2\n3 3 1\n'


@pytest.mark.unit
@pytest.mark.hermetic
def test_dump_operator_off_diagonal():
    out = io.StringIO()
    dump_operator(build_bulk_term(1, 3), out)
    entries = {}
    for line in out.getvalue().splitlines():
        row, col, value = line.split()
        entries[int(row), int(col)] = float(value)
    assert len(entries) == 8
    assert entries[index('(()'), index('()(')] == pytest.approx(-0.5)
