//! Shipped algebras: Heisenberg `h_d`, the 4-dimensional Engel algebra, the
//! free 2-step nilpotent algebra, abelian `R^n`, and strictly upper triangular
//! matrices.

use crate::algebra::LieAlgebra;
use crate::rational::{int, Rational};

fn build(names: Vec<String>, entries: &[(usize, usize, usize, Rational)]) -> LieAlgebra {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    LieAlgebra::from_brackets(&refs, entries).expect("preset algebra is valid")
}

/// `h_d` with basis `X1..Xd, Y1..Yd, Z` and `[Xi, Yi] = Z`. For `d = 1` the
/// basis is named `X, Y, Z`.
pub fn heisenberg(d: usize) -> LieAlgebra {
    assert!(d >= 1);
    let names: Vec<String> = if d == 1 {
        vec!["X".into(), "Y".into(), "Z".into()]
    } else {
        (1..=d)
            .map(|i| format!("X{i}"))
            .chain((1..=d).map(|i| format!("Y{i}")))
            .chain(std::iter::once("Z".to_string()))
            .collect()
    };
    let z = 2 * d;
    let entries: Vec<_> = (0..d).map(|i| (i, d + i, z, int(1))).collect();
    build(names, &entries)
}

/// `[X1, X2] = X3`, `[X1, X3] = X4`.
pub fn engel() -> LieAlgebra {
    let names = (1..=4).map(|i| format!("X{i}")).collect();
    build(names, &[(0, 1, 2, int(1)), (0, 2, 3, int(1))])
}

/// Free 2-step nilpotent algebra on `m` generators: `X1..Xm` followed by
/// `Zij` (`i < j`, lexicographic) with `[Xi, Xj] = Zij`.
pub fn free_two_step(m: usize) -> LieAlgebra {
    let mut names: Vec<String> = (1..=m).map(|i| format!("X{i}")).collect();
    let mut entries = Vec::new();
    let mut k = m;
    for i in 0..m {
        for j in i + 1..m {
            names.push(format!("Z{}{}", i + 1, j + 1));
            entries.push((i, j, k, int(1)));
            k += 1;
        }
    }
    build(names, &entries)
}

pub fn abelian(n: usize) -> LieAlgebra {
    let names = (1..=n).map(|i| format!("X{i}")).collect();
    build(names, &[])
}

/// Strictly upper triangular `k x k` matrices, basis `E_ij` (`i < j`) ordered
/// by superdiagonal then row, so the lower central series is spanned by basis
/// tails. Nilpotency class `k - 1`.
pub fn strictly_upper(k: usize) -> LieAlgebra {
    let mut pairs = Vec::new();
    for d in 1..k {
        for i in 0..k - d {
            pairs.push((i, i + d));
        }
    }
    let idx = |p: (usize, usize)| pairs.iter().position(|&q| q == p);
    let names: Vec<String> = pairs.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
    let mut entries = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k2, l)) in pairs.iter().enumerate() {
            if a >= b {
                continue;
            }
            // [E_ij, E_kl] = δ_jk E_il - δ_li E_kj
            if j == k2 {
                entries.push((a, b, idx((i, l)).unwrap(), int(1)));
            }
            if l == i {
                entries.push((a, b, idx((k2, j)).unwrap(), int(-1)));
            }
        }
    }
    build(names, &entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for (alg, class) in [
            (heisenberg(1), 2),
            (heisenberg(2), 2),
            (engel(), 3),
            (free_two_step(3), 2),
            (abelian(3), 1),
            (strictly_upper(4), 3),
            (strictly_upper(7), 6),
        ] {
            let r = alg.validate();
            assert!(r.ok(), "{:?}", alg.names());
            assert_eq!(r.nilpotency_class, Some(class));
        }
        assert_eq!(heisenberg(2).dim(), 5);
        assert_eq!(free_two_step(3).dim(), 6);
        assert_eq!(strictly_upper(4).dim(), 6);
    }
}
