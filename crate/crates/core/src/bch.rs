//! Baker-Campbell-Hausdorff series through degree 6.
//!
//! The table is generated once: `log(e^x e^y)` is expanded in the free
//! associative algebra on two letters, truncated at degree [`MAX_DEGREE`], and
//! each homogeneous degree-`m` component is turned into a Lie polynomial with
//! the Dynkin-Specht-Wever map `w ↦ [w_1,[w_2,...,w_m]] / m`. Evaluation
//! substitutes the algebra's own bracket, so no Hall basis is needed.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const MAX_DEGREE: usize = 6;

/// Word over `{0 = x, 1 = y}` read as a right-normed bracket.
pub type Word = Vec<u8>;

type Poly = BTreeMap<Word, Rational>;

static TABLE: OnceLock<Vec<(Word, Rational)>> = OnceLock::new();

/// `(word, coefficient)` pairs, sorted by word length then lexicographically.
/// Words whose right-normed bracket vanishes identically are omitted.
pub fn table() -> &'static [(Word, Rational)] {
    TABLE.get_or_init(generate)
}

fn poly_mul(a: &Poly, b: &Poly, max: usize) -> Poly {
    let mut out = Poly::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn generate() -> Vec<(Word, Rational)> {
    let d = MAX_DEGREE;
    // W = e^x e^y - 1
    let mut w = Poly::new();
    for a in 0..=d {
        for b in 0..=(d - a) {
            if a + b == 0 {
                continue;
            }
            let mut word = vec![0u8; a];
            word.extend(std::iter::repeat_n(1u8, b));
            w.insert(word, Rational::new(BigInt::one(), factorial(a) * factorial(b)));
        }
    }
    // log(1 + W) = sum (-1)^{k+1} W^k / k
    let mut log = Poly::new();
    let mut power = w.clone();
    for k in 1..=d {
        let c = Rational::new(if k % 2 == 1 { BigInt::one() } else { -BigInt::one() }, BigInt::from(k));
        for (word, v) in &power {
            *log.entry(word.clone()).or_insert_with(Rational::zero) += &c * v;
        }
        power = poly_mul(&power, &w, d);
    }
    let mut table: Vec<(Word, Rational)> = log
        .into_iter()
        .filter(|(word, c)| !c.is_zero() && !bracket_vanishes(word))
        .map(|(word, c)| {
            let m = word.len();
            let coeff = c / Rational::from_integer(BigInt::from(m));
            (word, coeff)
        })
        .collect();
    table.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    table
}

fn bracket_vanishes(word: &[u8]) -> bool {
    let m = word.len();
    m >= 2 && word[m - 1] == word[m - 2]
}

/// Exact `log(exp x exp y)`, truncating words longer than `class` (they vanish).
pub(crate) fn product(alg: &LieAlgebra, class: usize, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    if class > MAX_DEGREE {
        return Err(Error::BchDegreeUnsupported { class, max: MAX_DEGREE });
    }
    let n = alg.dim();
    let mut memo: HashMap<&[u8], Vec<Rational>> = HashMap::new();
    let mut out = vec![Rational::zero(); n];
    for (word, coeff) in table() {
        if word.len() > class {
            break;
        }
        let v = nested(alg, word, &x.coords, &y.coords, &mut memo);
        for (o, vi) in out.iter_mut().zip(v.iter()) {
            if !vi.is_zero() {
                *o += coeff * vi;
            }
        }
    }
    Ok(AlgebraElement::new(out))
}

fn nested<'w>(
    alg: &LieAlgebra,
    word: &'w [u8],
    x: &[Rational],
    y: &[Rational],
    memo: &mut HashMap<&'w [u8], Vec<Rational>>,
) -> Vec<Rational> {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let letter = |l: u8| if l == 0 { x.to_vec() } else { y.to_vec() };
    let v = if word.len() == 1 {
        letter(word[0])
    } else {
        let inner = nested(alg, &word[1..], x, y, memo);
        if inner.iter().all(Zero::is_zero) {
            inner
        } else {
            alg.br_vec(&letter(word[0]), &inner)
        }
    };
    memo.insert(word, v.clone());
    v
}

/// Floating-point counterpart of [`product`], same table.
pub(crate) fn product_f64(alg: &LieAlgebra, class: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if class > MAX_DEGREE {
        return Err(Error::BchDegreeUnsupported { class, max: MAX_DEGREE });
    }
    let n = alg.dim();
    let mut memo: HashMap<&[u8], Vec<f64>> = HashMap::new();
    let mut out = vec![0.0; n];
    for (word, coeff) in table() {
        if word.len() > class {
            break;
        }
        let v = nested_f64(alg, word, x, y, &mut memo);
        let c = rational::to_f64(coeff);
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += c * vi;
        }
    }
    Ok(out)
}

fn nested_f64<'w>(alg: &LieAlgebra, word: &'w [u8], x: &[f64], y: &[f64], memo: &mut HashMap<&'w [u8], Vec<f64>>) -> Vec<f64> {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let letter = |l: u8| if l == 0 { x.to_vec() } else { y.to_vec() };
    let v = if word.len() == 1 {
        letter(word[0])
    } else {
        let inner = nested_f64(alg, &word[1..], x, y, memo);
        alg.br_f64(&letter(word[0]), &inner)
    };
    memo.insert(word, v.clone());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn coeff(word: &[u8]) -> Rational {
        table().iter().find(|(w, _)| w == word).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    #[test]
    fn low_degree_coefficients() {
        assert_eq!(coeff(&[0]), rat(1, 1));
        assert_eq!(coeff(&[1]), rat(1, 1));
        // 1/2 [x,y] arrives as 1/4 [x,y] - 1/4 [y,x]
        assert_eq!(coeff(&[0, 1]), rat(1, 4));
        assert_eq!(coeff(&[1, 0]), rat(-1, 4));
    }

    #[test]
    fn table_is_nonempty_through_degree_six() {
        assert!(table().iter().any(|(w, _)| w.len() == 6));
        assert!(table().iter().all(|(w, _)| w.len() <= MAX_DEGREE));
    }
}
