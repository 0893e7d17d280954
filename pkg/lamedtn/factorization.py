"""
Factorization of the Lame operator into first-order pieces.

The symbol q of the factor Q in D_n^2 + B D_n + C = (D_n + B - Q)(D_n + Q) is computed term by
term: q_1 in closed form, and every lower term q_{-m-1} from the Sylvester equation
(q_1 - b_1) X + X q_1 = E_{-m}, whose right-hand side involves the terms already known.
"""
import logging

import numpy as np

from lamedtn.errors import BudgetError, ConditioningError, StructureError
from lamedtn.jet import SymbolMatrix
from lamedtn.jet.multiindex import degree_shell, factorial
from lamedtn.jet.series import truncate
from lamedtn.symbols import lame_symbols


class SymbolExpansion:
    """
    Homogeneous symbol terms of consecutive descending degrees
    :ivar kind: label of the expanded operator ('q' or 'p')
    :ivar residuals: relative Sylvester residual of each solved term, by degree
    :type residuals: dict
    :ivar cross_checks: distance between the closed-form and iterative solutions, by degree
    :type cross_checks: dict
    """
    def __init__(self, terms=(), kind='q'):
        self.kind = kind
        self.terms = {}
        self.residuals = {}
        self.cross_checks = {}
        for term in terms:
            self.append(term)

    def append(self, term):
        if self.terms:
            if term.degree != self.lowest-1:
                raise StructureError(f'Expected a term of degree {self.lowest-1}, received degree {term.degree}')
            first = self.terms[self.highest]
            if (term.dim, term.n_vars) != (first.dim, first.n_vars):
                raise StructureError(f'Term of degree {term.degree} does not match the expansion shape')
        self.terms[term.degree] = term

    @property
    def highest(self):
        return max(self.terms)

    @property
    def lowest(self):
        return min(self.terms)

    @property
    def degrees(self):
        return sorted(self.terms, reverse=True)

    @property
    def depth(self):
        return len(self.terms)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, degree):
        return degree in self.terms

    def __getitem__(self, degree):
        try:
            return self.terms[degree]
        except KeyError:
            raise StructureError(f'Expansion of {self.kind} has no term of degree {degree} '
                                 f'(degrees {self.highest}..{self.lowest})')

    def __iter__(self):
        return (self.terms[degree] for degree in self.degrees)

    def restrict(self, variables):
        """
        :returns: the expansion with the given variables frozen in every term
        """
        result = SymbolExpansion((term.restrict(variables) for term in self), self.kind)
        result.residuals = dict(self.residuals)
        result.cross_checks = dict(self.cross_checks)
        return result


def nilpotent_pair(symbols):
    """
    The rank-one nilpotent matrices F1 and F2 with q1 = |xi| I + kappa F1 and q1 - b1 = |xi| I + kappa F2
    :rtype: tuple(L{SymbolMatrix})
    """
    xi = symbols.cotangent
    norm = xi.norm
    inverse_norm = norm.inverse('|xi|')
    lam, mu = symbols.collar.lam, symbols.collar.mu
    into_normal = (lam+2*mu)*mu.inverse('mu')
    into_tangent = mu*(lam+2*mu).inverse('lambda+2mu')
    n = symbols.dim
    nn = n-1
    zero = symbols.space.zero()
    first = [[zero for _ in range(n)] for _ in range(n)]
    second = [[zero for _ in range(n)] for _ in range(n)]
    for alpha in range(n-1):
        for beta in range(n-1):
            first[alpha][beta] = second[alpha][beta] = xi.upper[alpha]*xi.lower[beta]*inverse_norm
        first[alpha][nn] = 1j*xi.upper[alpha]
        first[nn][alpha] = 1j*xi.lower[alpha]
        second[alpha][nn] = -1j*into_normal*xi.upper[alpha]
        second[nn][alpha] = -1j*into_tangent*xi.lower[alpha]
    first[nn][nn] = second[nn][nn] = -norm
    return SymbolMatrix.from_entries(first, 1), SymbolMatrix.from_entries(second, 1)


def principal_q(collar):
    """
    q_1 = |xi| I + kappa F1 with kappa = (lambda+mu)/(lambda+3mu)
    :rtype: L{SymbolMatrix}
    """
    symbols = lame_symbols(collar)
    first, _ = nilpotent_pair(symbols)
    identity = SymbolMatrix.identity(symbols.dim, collar.n_vars, collar.order, 1)
    result = identity*symbols.xi_norm+first*symbols.kappa
    eigenvalues = np.linalg.eigvals(result.value())
    if np.min(eigenvalues.real) <= 0:
        raise ConditioningError(f'Principal symbol q1 is not on the decaying branch: eigenvalues {eigenvalues}')
    return result


def _xi_derivative(symbol, space, index):
    """
    d_xi^J of a symbol; the degree drops by |J|
    """
    return symbol.partial_multi(space.cotangent, index).with_degree(symbol.degree-sum(index))


def _x_derivative(symbol, space, index):
    return symbol.partial_multi(space.tangential, index)


def _composition_term(left, right, index, space):
    """
    (-i)^|J|/J! d_xi^J left d_x^J right
    """
    size = sum(index)
    available = min(left.order, right.order)
    if size > available:
        raise BudgetError(size, available, 'composition term')
    weight = (-1j)**size/factorial(index)
    return (_xi_derivative(left, space, index) @ _x_derivative(right, space, index))*weight


def E_term(m, q, symbols):
    """
    Right-hand side of the Sylvester equation for q_{-m-1}
    :param m: -1 for the equation of q_0, 0 for q_{-1}, and so on
    :param q: expansion holding q_1..q_{-m}
    :type q: L{SymbolExpansion}
    :type symbols: L{LameSymbols}
    :rtype: L{SymbolMatrix}
    """
    space = symbols.space
    current = q[-m]
    result = symbols.b0 @ current+current.partial(space.normal)
    for beta in range(space.dim-1):
        unit = tuple(int(gamma == beta) for gamma in range(space.dim-1))
        result = result-(_xi_derivative(symbols.b1, space, unit) @ _x_derivative(current, space, unit))*1j
    for j in range(-m, 2):
        for k in range(-m, 2):
            size = j+k+m
            if size < 0:
                continue
            for index in degree_shell(space.dim-1, size):
                result = result-_composition_term(q[j], q[k], index, space)
    source = symbols.c(-m)
    if source is not None:
        result = result-source
    return result


def first_E(q, symbols):
    """
    E_1 = i sum (d_xi(q1-b1) d_x q1) + b0 q1 + d_n q1 - c1, written out term by term
    """
    space = symbols.space
    q1 = q[1]
    moved = q1-symbols.b1
    result = symbols.b0 @ q1+q1.partial(space.normal)-symbols.c1
    for beta in range(space.dim-1):
        slope = moved.partial(space.xi(beta)).with_degree(0)
        result = result+(slope @ q1.partial(space.x(beta)))*1j
    return result


def second_E(q, symbols):
    """
    E_0 = i sum (d_xi(q1-b1) d_x q0 + d_xi q0 d_x q1) + 1/2 sum d_xi d_xi q1 d_x d_x q1 - q0^2 + b0 q0 + d_n q0 - c0
    """
    space = symbols.space
    q1, q0 = q[1], q[0]
    moved = q1-symbols.b1
    result = symbols.b0 @ q0+q0.partial(space.normal)-q0 @ q0-symbols.c0
    for beta in range(space.dim-1):
        result = result+(moved.partial(space.xi(beta)).with_degree(0) @ q0.partial(space.x(beta)))*1j
        result = result+(q0.partial(space.xi(beta)).with_degree(-1) @ q1.partial(space.x(beta)))*1j
        for gamma in range(space.dim-1):
            curvature = q1.partial(space.xi(beta)).partial(space.xi(gamma)).with_degree(-1)
            result = result+(curvature @ q1.partial(space.x(beta)).partial(space.x(gamma)))*0.5
    return result


def next_q_closed_form(E, symbols):
    """
    Solve (q1-b1) X + X q1 = E in closed form:
    X = E/(2|xi|) - kappa/(4|xi|^2) (F2 E + E F1) + kappa^2/(4|xi|^3) F2 E F1
    :rtype: L{SymbolMatrix}
    """
    first, second = nilpotent_pair(symbols)
    inverse_norm = symbols.xi_norm.inverse('|xi|')
    kappa = symbols.kappa
    degree = E.degree-1
    plain = (E*(inverse_norm*0.5)).with_degree(degree)
    single = ((second @ E+E @ first)*(kappa*inverse_norm*inverse_norm*0.25)).with_degree(degree)
    double = ((second @ E @ first)*(kappa*kappa*inverse_norm*inverse_norm*inverse_norm*0.25)).with_degree(degree)
    return plain-single+double


def sylvester_solve(L, R, E, max_condition=1e12):
    """
    Solve L X + X R = E for jets by a fixed point over the non-constant parts of L and R, each step
    inverting the constant Kronecker operator kron(L0, I) + kron(I, R0^T)
    :rtype: L{SymbolMatrix}
    """
    if L.degree != R.degree:
        raise StructureError(f'Sylvester coefficients have degrees {L.degree} and {R.degree}')
    order = min(L.order, R.order, E.order)
    n = E.dim
    left, right, target = L.truncate(order), R.truncate(order), E.truncate(order)
    unit = np.eye(n)
    operator = np.kron(left.value(), unit)+np.kron(unit, right.value().T)
    condition = np.linalg.cond(operator)
    if condition > max_condition:
        raise ConditioningError(f'Sylvester operator has condition number {condition:.3e}')
    left_tail = SymbolMatrix(left.coeffs.copy(), left.n_vars, order, left.degree)
    left_tail.coeffs[:, :, 0] = 0.
    right_tail = SymbolMatrix(right.coeffs.copy(), right.n_vars, order, right.degree)
    right_tail.coeffs[:, :, 0] = 0.
    degree = E.degree-L.degree
    solution = SymbolMatrix.zeros(n, E.n_vars, order, degree)
    for sweep in range(order+1):
        residual = target-left_tail @ solution-solution @ right_tail
        flat = residual.coeffs.reshape(n*n, -1)
        solution = SymbolMatrix(np.linalg.solve(operator, flat).reshape(n, n, -1), E.n_vars, order, degree)
    return solution


def sylvester_residual(L, R, X, E):
    """
    :returns: max-norm of L X + X R - E relative to the size of E
    """
    return (L @ X+X @ R-E).max_norm()/max(E.max_norm(), 1.)


def full_expansion_q(collar, depth, cross_check=False):
    """
    Terms q_1, q_0, ..., q_{2-depth} (depth 1 is q_1 alone)
    :param cross_check: also solve every Sylvester equation iteratively and record the disagreement
    :rtype: L{SymbolExpansion}
    """
    if depth < 1:
        raise ValueError(f'Expansion depth must be positive, not {depth}')
    if collar.order < depth+2:
        raise BudgetError(depth+2, collar.order, 'expansion')
    symbols = lame_symbols(collar)
    q1 = principal_q(collar)
    moved = q1-symbols.b1
    expansion = SymbolExpansion([q1], 'q')
    for m in range(-1, depth-2):
        E = E_term(m, expansion, symbols)
        term = next_q_closed_form(E, symbols)
        expansion.residuals[term.degree] = sylvester_residual(moved, q1, term, E)
        if cross_check:
            expansion.cross_checks[term.degree] = term.distance(sylvester_solve(moved, q1, E))
        expansion.append(term)
        logging.debug(f'q_{term.degree}: order {term.order}, residual {expansion.residuals[term.degree]:.2e}')
    return expansion


def full_symbol_residual(q, symbols, degree):
    """
    Degree component of sum_J (-i)^|J|/J! (d_xi^J q d_x^J q - d_xi^J b d_x^J q) - d_n q + c
    :returns: its max-norm (zero when the factorization holds to that degree)
    :rtype: float
    """
    if degree > 2 or degree-1 < q.lowest:
        raise StructureError(f'Residual of degree {degree} needs q down to degree {degree-1}')
    space = symbols.space
    pieces = []
    for j in q.degrees:
        for k in q.degrees:
            if j+k < degree:
                continue
            for index in degree_shell(space.dim-1, j+k-degree):
                pieces.append(_composition_term(q[j], q[k], index, space))
    for l in (1, 0):
        for k in q.degrees:
            if l+k < degree:
                continue
            for index in degree_shell(space.dim-1, l+k-degree):
                pieces.append(-_composition_term(symbols.b(l), q[k], index, space))
    if degree in q:
        pieces.append(-q[degree].partial(space.normal))
    if symbols.c(degree) is not None:
        pieces.append(symbols.c(degree))
    order = min(piece.order for piece in pieces)
    total = sum(truncate(piece.coeffs, space.n_vars, order) for piece in pieces)
    return float(np.max(np.abs(total)))


def euler_defect(term, symbols):
    """
    Homogeneity check sum_beta xi_beta d_xi_beta sigma - degree sigma
    :returns: max-norm of the defect
    """
    space = symbols.space
    defect = term*(-float(term.degree))
    for beta in range(space.dim-1):
        defect = defect+term.partial(space.xi(beta))*symbols.cotangent.lower[beta]
    return defect.max_norm()
