import functools
import io
import sys

import click
import dotenv
import numpy as np

from .combinatorics import ClassId, EmptyClass, SpinWord, WordError, is_dyck
from .config import CapExceeded, Config, InvalidArgument, InvalidConfigError
from .entanglement import (
    MODES,
    SWEEP_COLUMNS,
    CutOutOfRange,
    NotNormalized,
    rank_deviation,
    sweep,
)
from .model import (
    BoundarySpec,
    FormsInequivalent,
    ModelForm,
    SiteOutOfRange,
    build_colored_hamiltonian,
    build_hamiltonian,
    check_form_equivalence,
    dump_operator,
)
from .orbits import (
    MismatchDetected,
    claimed_periodic_degeneracy,
    dump_orbits,
    orbit_partition,
    periodic_orbit_counts,
    phase_diagram,
    verify_orbit_theorem,
)
from .report import Report
from .solver import (
    ConvergenceFailure,
    cluster_eigenvalues,
    gap_exponent,
    gap_sweep,
    ground_degeneracy,
    lowest_eigenpairs,
)
from .states import (
    MAGNON_SCALE,
    anomalous_state,
    class_state,
    colored_dyck_state,
    dump_state,
    dyck_state,
    magnon_closure_residual,
    magnon_restricted_hamiltonian,
    magnon_sector,
    mps_matrices,
    mps_state,
    mps_truncation_report,
    xxx_one_magnon,
)

EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_CAP = 4
EXIT_MISMATCH = 5

_exit_codes = (
    (CapExceeded, EXIT_CAP),
    (ConvergenceFailure, EXIT_CONVERGENCE),
    (MismatchDetected, EXIT_MISMATCH),
    (FormsInequivalent, EXIT_MISMATCH),
    (InvalidConfigError, EXIT_CONFIG),
    (WordError, EXIT_CONFIG),
    (SiteOutOfRange, EXIT_CONFIG),
    (CutOutOfRange, EXIT_CONFIG),
    (EmptyClass, EXIT_CONFIG),
    (NotNormalized, EXIT_CONFIG),
    (InvalidArgument, EXIT_CONFIG),
)


def _fail(message, code):
    click.echo('error: %s' % message, err=True)
    sys.exit(code)


def command(f):
    """Run a subcommand, mapping library errors onto exit codes."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except tuple(e for e, _ in _exit_codes) as e:
            for kind, code in _exit_codes:
                if isinstance(e, kind):
                    _fail(e, code)
    return wrapper


def output_options(f):
    f = click.option('--out', type=click.Path(dir_okay=False), default=None)(f)
    f = click.option('--seed', type=int, default=None)(f)
    return f


def _format_option(default):
    return click.option('--format', 'fmt', type=click.Choice(['csv', 'json']),
                        default=default)


def _boundary(ctx, param, value):
    try:
        return BoundarySpec.parse(value)
    except ValueError as e:
        raise click.BadParameter(str(e))


_boundary_option = click.option('--boundary', default='open', callback=_boundary,
                                help='open, open:ALPHA,BETA, periodic or free')
_form_option = click.option('--form', type=click.Choice([f.value for f in ModelForm]),
                            default=ModelForm.PROJECTOR.value)


def _config(ctx, seed=None):
    return Config(seed=seed, **ctx.obj['overrides'])


def _provenance_command(ctx):
    params = {}
    for name, value in ctx.params.items():
        if name == 'out':
            continue
        params[name] = str(value) if isinstance(value, BoundarySpec) else value
    return {'name': ctx.info_name, 'params': params}


def _emit(ctx, report, fmt, out):
    text = report.render(fmt)
    _write(text, out)
    for deviation in dict.fromkeys(report.deviations):
        click.echo('deviation: %s' % deviation, err=True)


def _write(text, out):
    if out:
        with open(out, 'w', newline='') as stream:
            stream.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.option('--cap-bits', type=int, default=None,
              help='Largest word length enumerate may filter (FREDKIN_CAP_BITS).')
@click.option('--dense-cap-bits', type=int, default=None)
@click.option('--threads', type=int, default=1, show_default=True)
@click.pass_context
def cli(ctx, cap_bits, dense_cap_bits, threads):
    """Exact computations for the Fredkin spin chain."""
    ctx.ensure_object(dict)
    ctx.obj['overrides'] = {
        'enumeration_cap_bits': cap_bits,
        'dense_cap_bits': dense_cap_bits,
    }
    ctx.obj['threads'] = max(1, threads)


@cli.command()
@click.option('--sites', type=int, required=True)
@_boundary_option
@_form_option
@click.option('--colors', type=int, default=1)
@click.option('--count', type=int, default=4)
@click.option('--matrix-free', is_flag=True)
@_format_option('json')
@output_options
@click.pass_context
@command
def spectrum(ctx, sites, boundary, form, colors, count, matrix_free, fmt, out, seed):
    """Lowest eigenvalues, ground degeneracy and gap."""
    config = _config(ctx, seed)
    if colors == 1:
        op = build_hamiltonian(sites, boundary, ModelForm(form), matrix_free=matrix_free,
                               config=config)
    else:
        op = build_colored_hamiltonian(sites, colors, boundary, matrix_free=matrix_free,
                                       config=config)
    _, degeneracy = ground_degeneracy(op, config=config)
    result = lowest_eigenpairs(op, max(count, degeneracy + 1), config=config)
    clusters = cluster_eigenvalues(result.eigenvalues, config.cluster_tol)
    gap = clusters[1][0] - clusters[0][0] if len(clusters) > 1 else None
    deviations = []
    if boundary.is_periodic and colors == 1:
        claimed = claimed_periodic_degeneracy(sites)
        if degeneracy != claimed:
            deviations.append('periodic ground degeneracy at N=%d is %d, not %d'
                              % (sites, degeneracy, claimed))
    data = {
        'n': sites,
        'k': colors,
        'boundary': str(boundary),
        'form': form,
        'eigenvalues': result.eigenvalues,
        'residuals': result.residual_norms,
        'degeneracy': degeneracy,
        'gap': gap,
        'deviations': deviations,
    }
    _emit(ctx, Report(_provenance_command(ctx), config, data), fmt, out)


@cli.command()
@click.option('sizes', '--sites', type=int, multiple=True, required=True)
@click.option('cuts', '--cut', type=int, multiple=True,
              help='Cut positions; every cut 1..N-1 when omitted.')
@click.option('--colors', type=int, default=1)
@click.option('--mode', type=click.Choice(MODES), default='formula')
@_format_option('csv')
@output_options
@click.pass_context
@command
def entropy(ctx, sizes, cuts, colors, mode, fmt, out, seed):
    """Entanglement entropy of the (colored) Dyck state across cuts."""
    config = _config(ctx, seed)
    points = [(n, cut) for n in sizes for cut in (cuts or range(1, n))]
    rows = sweep(points, colors, mode, threads=ctx.obj['threads'], config=config)
    deviations = []
    if colors == 1 and mode != 'asymptotic':
        for n, cut in points:
            deviation = rank_deviation(n // 2, cut, config)
            if deviation:
                deviations.append(deviation)
    data = {'rows': rows, 'mode': mode, 'deviations': deviations}
    report = Report(_provenance_command(ctx), config, data, table=rows, columns=SWEEP_COLUMNS)
    _emit(ctx, report, fmt, out)


@cli.command()
@click.option('--sites', type=int, required=True)
@click.option('--periodic', is_flag=True)
@click.option('--colors', type=int, default=1)
@click.option('--verify', is_flag=True)
@_format_option('json')
@output_options
@click.pass_context
@command
def orbits(ctx, sites, periodic, colors, verify, fmt, out, seed):
    """Orbits of the Fredkin moves; --verify compares with the bulk kernel."""
    config = _config(ctx, seed)
    partition = orbit_partition(sites, periodic, colors, config)
    data = {
        'n': sites,
        'k': colors,
        'periodic': periodic,
        'orbit_count': partition.orbit_count,
        'sizes': partition.sizes,
        'deviations': [],
    }
    if periodic and colors == 1:
        counts = periodic_orbit_counts(sites, config)
        data['orbits_per_z'] = {str(z): c for z, c in sorted(counts.items())}
    if verify:
        result = verify_orbit_theorem(sites, periodic, colors, config)
        data['kernel_dim'] = result.kernel_dim
        data['max_residual'] = result.max_residual
        data['deviations'] = result.deviations
    table = [{'orbit_id': i, 'size': size, 'representative': rep}
             for i, (rep, size) in enumerate(zip(partition.representatives, partition.sizes))]
    report = Report(_provenance_command(ctx), config, data, table=table,
                    columns=['orbit_id', 'size', 'representative'])
    _emit(ctx, report, fmt, out)


@cli.command()
@click.option('--sites', type=int, required=True)
@click.option('--bond-dim', type=int, default=None, help='Defaults to N/2 + 1.')
@click.option('--verify', is_flag=True)
@_format_option('json')
@output_options
@click.pass_context
@command
def mps(ctx, sites, bond_dim, verify, fmt, out, seed):
    """Shift-matrix MPS of the Dyck state and its truncation error."""
    config = _config(ctx, seed)
    if sites < 2 or sites % 2:
        raise InvalidArgument('the Dyck state needs an even number of sites, got %d' % sites)
    rep = mps_matrices(sites, bond_dim)
    truncation = mps_truncation_report(sites, rep.bond_dim, config)
    data = dict(truncation._asdict())
    if verify:
        amplitudes = mps_state(rep, sites, config).amplitudes
        indicator = np.array([is_dyck(SpinWord(sites, i)) for i in range(2 ** sites)],
                             dtype=float)
        data['indicator_match'] = bool(np.array_equal(amplitudes, indicator))
        if not data['indicator_match']:
            raise MismatchDetected('MPS with bond dimension %d is not the Dyck indicator at N=%d'
                                   % (rep.bond_dim, sites))
    _emit(ctx, Report(_provenance_command(ctx), config, data), fmt, out)


@cli.command()
@click.option('--sites', type=int, required=True)
@click.option('--verify', is_flag=True)
@_format_option('json')
@output_options
@click.pass_context
@command
def magnon(ctx, sites, verify, fmt, out, seed):
    """Single-peak sector against the XXX one-magnon chain on N-1 sites."""
    config = _config(ctx, seed)
    sector = magnon_sector(sites)
    restricted = magnon_restricted_hamiltonian(sites, config=config).toarray()
    reference = MAGNON_SCALE * xxx_one_magnon(sites - 1).toarray()
    fredkin_values = np.linalg.eigvalsh(restricted)
    xxx_values = np.linalg.eigvalsh(reference)
    data = {
        'n': sites,
        'a': sector.a,
        'b': sector.b,
        'basis': [str(w) for w in sector.basis],
        'scale': MAGNON_SCALE,
        'fredkin_eigenvalues': fredkin_values,
        'xxx_eigenvalues': xxx_values,
        'max_difference': float(np.abs(fredkin_values - xxx_values).max()),
        'closure_residual': magnon_closure_residual(sites, config=config),
    }
    if verify and (data['max_difference'] > 1e-9 or data['closure_residual'] > 1e-12
                   or np.abs(restricted - reference).max() > 1e-12):
        raise MismatchDetected('magnon sector at N=%d differs from the XXX chain by %.3g'
                               % (sites, data['max_difference']))
    table = [{'index': i, 'fredkin': f, 'xxx': x}
             for i, (f, x) in enumerate(zip(fredkin_values, xxx_values))]
    report = Report(_provenance_command(ctx), config, data, table=table,
                    columns=['index', 'fredkin', 'xxx'])
    _emit(ctx, report, fmt, out)


@cli.command()
@click.option('--sites', type=int, required=True)
@_format_option('json')
@output_options
@click.pass_context
@command
def phase(ctx, sites, fmt, out, seed):
    """Ground degeneracy per sign quadrant of the boundary couplings."""
    config = _config(ctx, seed)
    diagram = phase_diagram(sites, config)
    rows = [{
        'alpha_sign': row.signs[0],
        'beta_sign': row.signs[1],
        'magnitude': row.magnitude,
        'degeneracy': row.degeneracy,
        'ground_energy': row.ground_energy,
        'states': ' '.join(row.states),
    } for row in diagram.rows]
    data = {'n': sites, 'rows': rows, 'deviations': diagram.deviations}
    report = Report(_provenance_command(ctx), config, data, table=rows,
                    columns=['alpha_sign', 'beta_sign', 'magnitude', 'degeneracy',
                             'ground_energy', 'states'])
    _emit(ctx, report, fmt, out)


@cli.command()
@click.option('sizes', '--sites', type=int, multiple=True, required=True)
@_boundary_option
@_form_option
@_format_option('json')
@output_options
@click.pass_context
@command
def gap(ctx, sizes, boundary, form, fmt, out, seed):
    """Spectral gap over several sizes and its log-log slope."""
    config = _config(ctx, seed)
    gaps = gap_sweep(sizes, boundary, ModelForm(form), ctx.obj['threads'], config)
    rows = [{'N': n, 'gap': g} for n, g in gaps]
    data = {
        'boundary': str(boundary),
        'rows': rows,
        'decreasing': all(b[1] < a[1] for a, b in zip(gaps, gaps[1:])),
        'exponent': gap_exponent(sizes, [g for _, g in gaps]) if len(gaps) > 1 else None,
    }
    report = Report(_provenance_command(ctx), config, data, table=rows, columns=['N', 'gap'])
    _emit(ctx, report, fmt, out)


@cli.command()
@click.option('--sites', type=int, default=3)
@click.option('--tol', type=float, default=1e-12)
@_format_option('json')
@output_options
@click.pass_context
@command
def forms(ctx, sites, tol, fmt, out, seed):
    """Scalars relating the Pauli and Fredkin-gate forms to the projector form."""
    config = _config(ctx, seed)
    ratios = check_form_equivalence(sites, tol, config)
    _emit(ctx, Report(_provenance_command(ctx), config, dict(ratios._asdict())), fmt, out)


@cli.command('dump-state')
@click.option('--state', 'kind', type=click.Choice(['dyck', 'colored-dyck', 'anomalous', 'class']),
              default='dyck')
@click.option('--sites', type=int, required=True)
@click.option('--colors', type=int, default=1)
@click.option('--class', 'class_id', default=None, help='A,B for --state class')
@output_options
@click.pass_context
@command
def dump_state_command(ctx, kind, sites, colors, class_id, out, seed):
    """Write `word<TAB>amplitude` lines of one of the exact states."""
    config = _config(ctx, seed)
    if kind != 'class' and sites % 2:
        raise InvalidArgument('%s state needs an even number of sites, got %d' % (kind, sites))
    if kind == 'dyck':
        state = dyck_state(sites // 2, config)
    elif kind == 'colored-dyck':
        state = colored_dyck_state(sites // 2, colors, config)
    elif kind == 'anomalous':
        state = anomalous_state(sites // 2, config)
    else:
        if not class_id:
            raise InvalidArgument('--state class needs --class A,B')
        try:
            a, b = (int(x) for x in class_id.split(','))
        except ValueError:
            raise InvalidArgument('expected --class A,B, got %r' % class_id)
        state = class_state(ClassId(a, b), sites, config)
    _dump(lambda stream: dump_state(state, stream), out)


@cli.command('dump-operator')
@click.option('--sites', type=int, required=True)
@_boundary_option
@_form_option
@click.option('--colors', type=int, default=1)
@output_options
@click.pass_context
@command
def dump_operator_command(ctx, sites, boundary, form, colors, out, seed):
    """Write the Hamiltonian as `row col value` lines."""
    config = _config(ctx, seed)
    if colors == 1:
        op = build_hamiltonian(sites, boundary, ModelForm(form), config=config)
    else:
        op = build_colored_hamiltonian(sites, colors, boundary, config=config)
    _dump(lambda stream: dump_operator(op, stream), out)


@cli.command('dump-orbits')
@click.option('--sites', type=int, required=True)
@click.option('--periodic', is_flag=True)
@click.option('--colors', type=int, default=1)
@output_options
@click.pass_context
@command
def dump_orbits_command(ctx, sites, periodic, colors, out, seed):
    """Write `orbit_id<TAB>size<TAB>representative` lines."""
    config = _config(ctx, seed)
    partition = orbit_partition(sites, periodic, colors, config)
    _dump(lambda stream: dump_orbits(partition, stream), out)


def _dump(writer, out):
    stream = io.StringIO()
    writer(stream)
    _write(stream.getvalue(), out)


def main():
    dotenv.load_dotenv()
    cli(auto_envvar_prefix='FREDKIN')
