"""
The Lame operator applied to jets of displacement fields.

Three independent evaluations are provided: the expanded coordinate form, the covariant
Bochner form, and the factored form A(D_n^2 + B D_n + C) assembled from the symbols.  They
agree up to truncation and serve as reconstruction checks for the symbol builders.
A displacement field is a list of n jets holding its contravariant components u^j.
"""
from lamedtn.errors import StructureError
from lamedtn.geometry import christoffel, full_metric, inverse_metric, ricci
from lamedtn.jet.multiindex import degree_shell, factorial
from lamedtn.symbols import lame_symbols


def _total(jets, start):
    result = start
    for jet in jets:
        result = result+jet
    return result


def _check_field(collar, field):
    if len(field) != collar.dim:
        raise StructureError(f'Displacement needs {collar.dim} components, received {len(field)}')
    for component in field:
        if component.n_vars != collar.n_vars:
            raise StructureError(f'Displacement components must be jets in {collar.n_vars} variables')


def laplace_beltrami(collar, scalar):
    """
    Delta_g v = g^{jk}(d_j d_k v - Gamma^l_{jk} d_l v)
    """
    space = collar.space
    n = collar.dim
    ginv = inverse_metric(collar)
    gamma = christoffel(collar)
    gradient = [scalar.partial(space.x(l)) for l in range(n)]
    return _total((ginv[j, k]*(gradient[j].partial(space.x(k)) -
                               _total((gamma[l, j, k]*gradient[l] for l in range(n)), space.zero()))
                   for j in range(n) for k in range(n)), space.zero())


def _covariant(collar, field):
    """
    :returns: T[j][k] = nabla_k u^j
    """
    space = collar.space
    n = collar.dim
    gamma = christoffel(collar)
    return [[field[j].partial(space.x(k))+_total((gamma[j, k, m]*field[m] for m in range(n)), space.zero())
             for k in range(n)] for j in range(n)]


def apply_lame(collar, field):
    """
    Expanded coordinate form of the operator, using the Laplace-Beltrami operator
    :param field: contravariant components of the displacement
    :type field: list(L{Jet})
    :rtype: list(L{Jet})
    """
    _check_field(collar, field)
    space = collar.space
    n = collar.dim
    zero = space.zero()
    metric = full_metric(collar)
    ginv = inverse_metric(collar)
    gamma = christoffel(collar)
    lam, mu = collar.lam, collar.mu
    gradient = [[field[j].partial(space.x(k)) for k in range(n)] for j in range(n)]
    covariant = _covariant(collar, field)
    divergence = _total((covariant[k][k] for k in range(n)), zero)
    lowered = [_total((metric[k, m]*field[m] for m in range(n)), zero) for k in range(n)]
    # lowered_covariant[l][k] = nabla_l u_k
    lowered_covariant = [[lowered[k].partial(space.x(l))-_total((gamma[p, l, k]*lowered[p] for p in range(n)), zero)
                          for k in range(n)] for l in range(n)]
    dlam = [lam.partial(space.x(l)) for l in range(n)]
    dmu = [mu.partial(space.x(l)) for l in range(n)]
    grad_mu = [_total((ginv[k, p]*dmu[p] for p in range(n)), zero) for k in range(n)]
    ddiv = [divergence.partial(space.x(l)) for l in range(n)]
    result = []
    for j in range(n):
        grad_div = _total((ginv[j, l]*ddiv[l] for l in range(n)), zero)
        grad_lam = _total((ginv[j, l]*dlam[l] for l in range(n)), zero)
        strain = _total((grad_mu[k]*(covariant[j][k]+_total((ginv[j, l]*lowered_covariant[l][k] for l in range(n)),
                                                             zero)) for k in range(n)), zero)
        tail = _total((ginv[k, l]*(2*_total((gamma[j, k, m]*gradient[m][l] for m in range(n)), zero) +
                                   _total((gamma[j, k, l].partial(space.x(m))*field[m] for m in range(n)), zero))
                       for k in range(n) for l in range(n)), zero)
        result.append(mu*laplace_beltrami(collar, field[j])+(lam+mu)*grad_div+grad_lam*divergence+strain+mu*tail)
    return result


def apply_lame_bochner(collar, field):
    """
    Covariant form mu Delta_B u + (lambda+mu) grad div u + mu Ric(u) + (grad lambda) div u + (Su)(grad mu)
    :rtype: list(L{Jet})
    """
    _check_field(collar, field)
    space = collar.space
    n = collar.dim
    zero = space.zero()
    metric = full_metric(collar)
    ginv = inverse_metric(collar)
    gamma = christoffel(collar)
    curvature = ricci(collar)
    lam, mu = collar.lam, collar.mu
    covariant = _covariant(collar, field)
    # second[j][k][l] = nabla_l nabla_k u^j
    second = [[[covariant[j][k].partial(space.x(l)) +
                _total((gamma[j, l, m]*covariant[m][k] for m in range(n)), zero) -
                _total((gamma[m, l, k]*covariant[j][m] for m in range(n)), zero)
                for l in range(n)] for k in range(n)] for j in range(n)]
    divergence = _total((covariant[k][k] for k in range(n)), zero)
    lowered = [[_total((metric[k, m]*covariant[m][l] for m in range(n)), zero) for l in range(n)] for k in range(n)]
    dlam = [lam.partial(space.x(l)) for l in range(n)]
    dmu = [mu.partial(space.x(l)) for l in range(n)]
    result = []
    for j in range(n):
        bochner = _total((ginv[k, l]*second[j][k][l] for k in range(n) for l in range(n)), zero)
        grad_div = _total((ginv[j, l]*divergence.partial(space.x(l)) for l in range(n)), zero)
        curved = _total((ginv[j, k]*curvature[k, l]*field[l] for k in range(n) for l in range(n)), zero)
        grad_lam = _total((ginv[j, l]*dlam[l] for l in range(n)), zero)
        # (Su)^j_k grad^k mu with (Su)^j_k = nabla_k u^j + g^{jl} nabla_l u_k
        strain = _total(((covariant[j][k]+_total((ginv[j, l]*lowered[k][l] for l in range(n)), zero)) *
                         _total((ginv[k, p]*dmu[p] for p in range(n)), zero) for k in range(n)), zero)
        result.append(mu*bochner+(lam+mu)*grad_div+mu*curved+grad_lam*divergence+strain)
    return result


def _differential(collar, symbol, order):
    """
    Coefficients of the differential operator with the given homogeneous polynomial symbol
    :returns: list of C{(index, coefficient)} with C{index} a tangential multi-index and C{coefficient} an xi-free matrix
    """
    space = collar.space
    terms = []
    for index in degree_shell(space.dim-1, order):
        coefficient = symbol.partial_multi(space.cotangent, index)*((-1j)**order/factorial(index))
        terms.append((index, coefficient.restrict(space.cotangent)))
    return terms


def _apply_matrix(matrix, vector, zero):
    return [_total((matrix[i, j]*vector[j] for j in range(len(vector))), zero) for i in range(len(vector))]


def _apply_symbol(collar, symbol, order, field):
    space = collar.space
    zero = space.zero()
    result = [zero]*collar.dim
    for index, coefficient in _differential(collar, symbol, order):
        derivative = [component for component in field]
        for var, times in zip(space.tangential, index):
            for _ in range(times):
                derivative = [component.partial(space.x(var)) for component in derivative]
        result = [a+b for a, b in zip(result, _apply_matrix(coefficient, derivative, zero))]
    return result


def apply_factored(collar, field):
    """
    A(d_n^2 u + B d_n u + C u) with the differential operators B and C read off the symbols b1, b0, c2, c1, c0
    :rtype: list(L{Jet})
    """
    _check_field(collar, field)
    symbols = lame_symbols(collar)
    space = collar.space
    normal = [component.partial(space.normal) for component in field]
    second = [component.partial(space.normal) for component in normal]
    pieces = [second,
              _apply_symbol(collar, symbols.b1, 1, normal), _apply_symbol(collar, symbols.b0, 0, normal),
              _apply_symbol(collar, symbols.c2, 2, field), _apply_symbol(collar, symbols.c1, 1, field),
              _apply_symbol(collar, symbols.c0, 0, field)]
    inner = [_total(parts[1:], parts[0]) for parts in zip(*pieces)]
    return _apply_matrix(symbols.A, inner, space.zero())


def field_distance(first, second):
    """
    :returns: max-norm distance between two displacement jets at their common order
    """
    return max((a-b).max_norm() for a, b in zip(first, second))


def field_scale(field):
    return max(max(component.max_norm() for component in field), 1.)


def polynomial_field(space, terms):
    """
    :param terms: one list of C{(exponents, coefficient)} per component
    """
    return [space.polynomial(component) for component in terms]
