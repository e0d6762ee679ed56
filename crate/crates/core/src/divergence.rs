//! Entropy functions, their convex conjugates, and the discrete
//! f-divergences built from them.
//!
//! All functions return extended reals in-band: `f64::INFINITY` is a
//! legitimate value (a violated hard constraint), never an error.

/// The six scalar entropy functions supported by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyKind {
    /// `s ln s - s + 1`
    Kl,
    /// `|s - 1|` on `s >= 0`
    Tv,
    /// `1 - s` on `[0, 1]`
    Ptv,
    /// indicator of `{1}`
    Equality,
    /// identically zero on the whole real line
    Zero,
    /// indicator of `[0, 1]`
    Interval,
}

impl EntropyKind {
    pub const ALL: [EntropyKind; 6] = [
        EntropyKind::Kl,
        EntropyKind::Tv,
        EntropyKind::Ptv,
        EntropyKind::Equality,
        EntropyKind::Zero,
        EntropyKind::Interval,
    ];

    /// `f(s)`.
    pub fn value(self, s: f64) -> f64 {
        match self {
            EntropyKind::Kl => {
                if s > 0.0 {
                    s * s.ln() - s + 1.0
                } else if s == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Tv => {
                if s >= 0.0 {
                    (s - 1.0).abs()
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Ptv => {
                if (0.0..=1.0).contains(&s) {
                    1.0 - s
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Equality => {
                if s == 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Zero => 0.0,
            EntropyKind::Interval => {
                if (0.0..=1.0).contains(&s) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Convex conjugate `f*(s') = sup_s s s' - f(s)`.
    pub fn conjugate(self, s: f64) -> f64 {
        match self {
            EntropyKind::Kl => s.exp() - 1.0,
            EntropyKind::Tv => {
                if s <= 1.0 {
                    s.max(-1.0)
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Ptv => s.max(-1.0),
            EntropyKind::Equality => s,
            EntropyKind::Zero => {
                if s == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            EntropyKind::Interval => s.max(0.0),
        }
    }

    /// Recession slope `f'_inf = lim f(s)/s`, which prices mass that is
    /// singular with respect to the reference measure.
    pub fn recession(self) -> f64 {
        match self {
            EntropyKind::Tv => 1.0,
            EntropyKind::Zero => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// Multiplication with the `0 * inf = 0` convention.
fn scaled(factor: f64, value: f64) -> f64 {
    if factor == 0.0 {
        0.0
    } else {
        factor * value
    }
}

/// `D_f(a || b) = sum_{b_i > 0} f(a_i / b_i) b_i + f'_inf * sum_{b_i = 0} a_i`.
///
/// Panics if the slices differ in length.
pub fn f_divergence(kind: EntropyKind, a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "f_divergence: length mismatch");
    let mut absolutely_continuous = 0.0;
    let mut singular = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        if bi > 0.0 {
            absolutely_continuous += kind.value(ai / bi) * bi;
        } else {
            singular += ai;
        }
    }
    absolutely_continuous + scaled(singular, kind.recession())
}

/// `sum_i lambda_i |b_i - a_i|`.
pub fn weighted_tv_penalty(lambda: &[f64], a: &[f64], b: &[f64]) -> f64 {
    assert!(lambda.len() == a.len() && a.len() == b.len());
    lambda
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&l, (&ai, &bi))| l * (bi - ai).abs())
        .sum()
}

/// `sum_i lambda_i (b_i - a_i)` if `a <= b + tol` entrywise, else `+inf`.
pub fn weighted_ptv_penalty(lambda: &[f64], a: &[f64], b: &[f64], tol: f64) -> f64 {
    assert!(lambda.len() == a.len() && a.len() == b.len());
    let mut total = 0.0;
    for (&l, (&ai, &bi)) in lambda.iter().zip(a.iter().zip(b)) {
        if ai > bi + tol {
            return f64::INFINITY;
        }
        total += l * (bi - ai);
    }
    total
}
