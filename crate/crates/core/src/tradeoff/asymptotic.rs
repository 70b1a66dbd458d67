use num_bigint::BigInt;

use super::{functional_capacity, p1_gamma, perf_p1, AsymptoticSetup};
use crate::error::Result;
use crate::rational::Rational;

/// How the construction index `i = 1 + s (k_M - 1)` is turned into the
/// evaluated point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IndexRounding {
    /// Round to the nearest integer (ties up) and evaluate a realizable code
    /// point.
    #[default]
    Nearest,
    /// Plug the rational index straight into the closed forms.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticResult {
    /// Index actually evaluated (an integer under [`IndexRounding::Nearest`]).
    pub i: Rational,
    /// `P1 / C` at the shifted parameters.
    pub fraction: Rational,
    pub h1: Rational,
    pub h2: Rational,
    pub h3: Rational,
    pub h4: Rational,
}

impl AsymptoticResult {
    /// `(h1/M^3, h2/M, h3/M^2, h4/M^2)`
    pub fn scaled_terms(&self, m: usize) -> (Rational, Rational, Rational, Rational) {
        let m = Rational::from(m);
        let m2 = &m * &m;
        let m3 = &m2 * &m;
        (&self.h1 / m3, &self.h2 / &m, &self.h3 / &m2, &self.h4 / m2)
    }
}

/// Ratio of the main construction's file size to the functional-repair
/// capacity along the shifted family `(n+M, k+M, d+M)`, plus the four
/// auxiliary terms whose limits drive the ratio to one.
pub fn asymptotic_fraction(setup: &AsymptoticSetup, rounding: IndexRounding) -> Result<AsymptoticResult> {
    let shifted = setup.shifted();
    let base = setup.base();
    let s = setup.s();
    let one = Rational::one();
    let i_exact = setup.i_exact();

    let (i, file, gamma) = match rounding {
        IndexRounding::Nearest => {
            let rounded: BigInt = i_exact.round_half_up();
            let rounded: usize = usize::try_from(rounded)
                .expect("index bounded by k_M")
                .clamp(1, shifted.k());
            let pt = perf_p1(&shifted, &one, rounded)?;
            (Rational::from(rounded), pt.file_size, pt.gamma)
        }
        IndexRounding::Exact => {
            let gap = Rational::from(shifted.n() - shifted.k());
            let file = Rational::from(shifted.n()) * &i_exact / (gap + &i_exact);
            let gamma = p1_gamma(&shifted, &one, &i_exact);
            (i_exact.clone(), file, gamma)
        }
    };
    let capacity = functional_capacity(&shifted, &one, &gamma)?;
    let fraction = file / capacity;

    let (n, k, d) = (base.n(), base.k(), base.d());
    let m = Rational::from(setup.m());
    let n_m = Rational::from(shifted.n());
    let k_m = Rational::from(shifted.k());
    let d_m = Rational::from(shifted.d());
    let gap = Rational::from(d - k + 1);
    let sk = s * Rational::from(shifted.k() - 1);
    let t = &d_m * &sk / (&gap + &sk);

    let h1 = Rational::integer(2) * &n_m * (&one + &sk) * &d_m * &gap;
    let h2 = Rational::from(n - k + 1) + &sk;
    let h3 = Rational::integer(2) * (&t + &one) * &d_m * &gap;
    let h4 = (&k_m - &t - &one) * (Rational::from(2 * d - k) + &m - &t) * (&gap + &sk);

    Ok(AsymptoticResult {
        i,
        fraction,
        h1,
        h2,
        h3,
        h4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tradeoff::{perf_p1_interpolated, SystemParams};

    fn setup(n: usize, k: usize, d: usize, s: Rational, m: usize) -> AsymptoticSetup {
        AsymptoticSetup::new(SystemParams::new(n, k, d).unwrap(), s, m).unwrap()
    }

    #[test]
    fn msr_end_is_exactly_one() {
        // s = 1 puts i at k_M, where the construction meets capacity
        for m in [0, 5, 1000] {
            let res = asymptotic_fraction(&setup(2, 1, 1, Rational::one(), m), IndexRounding::Nearest).unwrap();
            assert_eq!(res.fraction, Rational::one());
            assert_eq!(res.i, Rational::from(m + 1));
        }
    }

    #[test]
    fn fraction_never_exceeds_one() {
        for (n, k, d) in [(2, 1, 1), (3, 1, 1), (4, 2, 3), (6, 3, 5)] {
            for s in [Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 4)] {
                for m in [0, 3, 17, 200] {
                    let res = asymptotic_fraction(&setup(n, k, d, s.clone(), m), IndexRounding::Nearest).unwrap();
                    assert!(res.fraction <= Rational::one(), "({n},{k},{d}) s={s} M={m}");
                    assert!(res.fraction.is_positive());
                }
            }
        }
    }

    #[test]
    fn exact_index_can_overshoot() {
        // the closed form at a non-integer index is not a code point
        let res = asymptotic_fraction(&setup(2, 1, 1, Rational::new(3, 4), 3), IndexRounding::Exact).unwrap();
        assert_eq!(res.fraction, Rational::new(1040, 1037));
    }

    #[test]
    fn recomputed_through_public_formulas() {
        let st = setup(4, 2, 3, Rational::new(1, 2), 1000);
        let res = asymptotic_fraction(&st, IndexRounding::Nearest).unwrap();
        let shifted = st.shifted();
        let one = Rational::one();
        let p1 = perf_p1_interpolated(&shifted, &one, &res.i).unwrap();
        let cap = functional_capacity(&shifted, &one, &p1_gamma(&shifted, &one, &res.i)).unwrap();
        assert_eq!(res.fraction, p1 / cap);
    }

    #[test]
    fn ties_round_up() {
        // s (k_M - 1) = 1/2 * 3 = 3/2, so i = 5/2 rounds to 3
        let res = asymptotic_fraction(&setup(2, 1, 1, Rational::new(1, 2), 3), IndexRounding::Nearest).unwrap();
        assert_eq!(res.i, Rational::integer(3));
        let res = asymptotic_fraction(&setup(2, 1, 1, Rational::new(1, 2), 3), IndexRounding::Exact).unwrap();
        assert_eq!(res.i, Rational::new(5, 2));
    }

    #[test]
    fn h2_offset_is_exact() {
        // h2/M - s = (n - k + 1 + s (k - 1)) / M
        for (n, k, d) in [(2, 1, 1), (3, 1, 1), (4, 2, 3)] {
            for s in [Rational::new(1, 4), Rational::new(1, 2), Rational::one()] {
                let m = 10_000;
                let res = asymptotic_fraction(&setup(n, k, d, s.clone(), m), IndexRounding::Nearest).unwrap();
                let (_, h2m, _, _) = res.scaled_terms(m);
                let expected = (Rational::from(n - k + 1) + &s * Rational::from(k - 1)) / Rational::from(m);
                assert_eq!(h2m - &s, expected);
            }
        }
    }

    #[test]
    fn scaled_terms_approach_limits() {
        let st = setup(3, 1, 1, Rational::new(1, 4), 100_000);
        let res = asymptotic_fraction(&st, IndexRounding::Exact).unwrap();
        let (h1, h2, h3, h4) = res.scaled_terms(st.m());
        let s = st.s().clone();
        let gap = Rational::one();
        let tol = Rational::new(1, 1000);
        assert!((h1 - Rational::integer(2) * &s * &gap).abs() < tol);
        assert!((h2 - &s).abs() < tol);
        assert!((h3 - Rational::integer(2) * &gap).abs() < tol);
        assert!(h4.abs() < tol);
    }
}
