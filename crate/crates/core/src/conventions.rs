//! Sign and scale conventions fixed by exact small-`n` algebra and pinned by
//! the test suite.
//!
//! Every constant here is asserted by at least one test; changing a formula
//! elsewhere in the crate without updating this table makes those tests fail.
//! [`TABLE`] is the human-readable form and is hashed into CLI output
//! metadata so that exported data records which conventions produced it.

use crate::matrix::C64;

/// `c` in `J^2 = c * I_{+-} * J`, for both `J_{+-}` and `J~_{+-}`.
pub const QUADRATIC_CONSTANT: C64 = C64::new(0.0, -1.0);

/// `L_{X++} o J_{+-} = PAIRING_PP * I_{+-}`, with `X++ = i * identity`.
pub const PAIRING_PP: f64 = 1.0;

/// `L_{X+-} o J_{+-} = PAIRING_PM * I_{++}`, with `X+- = i diag(E, -E)`.
pub const PAIRING_PM: f64 = 1.0;

/// `L_{X+-} o J_0 = PAIRING_ZERO * I_0`, with `I_0 = -2i Tr rho`.
pub const PAIRING_ZERO: f64 = 1.0;

/// `L_{X~+-} o J~_0 = I~_0` for the generator `C^+ X+- C = [[0, E], [-E, 0]]`.
pub const PAIRING_TILDE_ZERO: f64 = 1.0;

/// `I~_{++} o R = ENERGY_MATCH * I~_0`.
pub const ENERGY_MATCH: f64 = 1.0;

/// `H_0(y, x_KS) = KEPLER_H0_FACTOR * I~_0` for `x_KS = zeta^+ sigma zeta`.
pub const KEPLER_H0_FACTOR: f64 = 1.0;

/// `|x_KS| = KS_NORM_FACTOR * zeta^+ zeta`.
pub const KS_NORM_FACTOR: f64 = 1.0;

/// `x_KS = KS_X_OVER_PAULI * pauli_decompose(X).vec`.
pub const KS_X_OVER_PAULI: f64 = 2.0;

/// `pauli_decompose(M).vec = MR_VECTOR_SCALE * (2 y x x_KS)`, and likewise
/// for `R`.
pub const MR_VECTOR_SCALE: f64 = 0.5;

/// Factor in `gamma~_0 restricted to the KS image = ONE_FORM_FACTOR * y . dx`
/// (modulo an exact form), with `x` from `pauli_decompose(X)`.
pub const ONE_FORM_FACTOR: f64 = 2.0;

pub const TABLE: &str = "\
quantity                                   value
J^2 = c I_{+-} J  (both realizations)      c = -i
L_{X++} o J_{+-}                           +1 * I_{+-}
L_{X+-} o J_{+-}                           +1 * I_{++}
L_{X+-} o J_0                              +1 * I_0, I_0 = -2i Tr rho
X_{++}, X_{+-}                             i * identity, i diag(E, -E)
X~_{+-} (pulled back)                      [[0, E], [-E, 0]]
X~_{++} (pulled back)                      i * identity
L_{X~+-} o J~_0                            +1 * I~_0
I~_{++} o R                                +1 * I~_0
H_0 = |x_KS| (1 + y^2)                     +1 * I~_0
|x_KS|                                     zeta^+ zeta
x_KS                                       2 * pauli(X).vec
pauli(A)                                   a0 = Tr A / 2, a_k = Tr(A sigma_k) / 2
sigma_2                                    [[0, -i], [i, 0]]
pauli(M).vec                               (1/2) * 2 y x x_KS
pauli(R).vec                               (1/2) * ((1 - y^2) x_KS + 2 y (x_KS . y))
pauli(R).scalar                            (1/2) |x_KS| (1 + y^2)
pauli(M).scalar                            0
gamma~_0 on KS image                       2 y . dx, x = pauli(X).vec
Riccati field                              Y' = E + Y^2, X' = -(XY + YX)
symplectic form                            omega = d gamma~_0, gamma~_0 = -Tr(X dY), i_V omega = dH
flat bracket flow                          f' = {H, f}, eta' = i dH/d(conj eta), xi' = -i dH/d(conj xi)
integrability                              sum_j rho_{r,j} k_j + rho_{r,n+j} l_j = delta_{r1}
";
