//! Contraction patterns over ACT factors with symmetrized (round) and antisymmetrized
//! (square) index groups.
//!
//! Every round label is a slot fully symmetrized with the other round labels. A symmetric
//! tensor vanishes iff its contraction with `x ⊗ ... ⊗ x` vanishes for all `x`, so round
//! slots are contracted with a common vector and identities are tested as homogeneous
//! polynomials. Square groups are expanded as explicit signed permutation sums. Labels in
//! `excluded` are dropped from the square group. Normalizing weights are omitted.

use crate::mat::Vec4;
use crate::scalar::Ring;
use crate::tensor::act::Act;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTerm {
    pub coeff: i64,
    pub factors: Vec<[char; 4]>,
    pub square: Vec<char>,
    pub excluded: Vec<char>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizedExpression {
    pub name: String,
    pub round: Vec<char>,
    pub free: Vec<char>,
    pub terms: Vec<SymTerm>,
}

fn parse_factors(spec: &str) -> Vec<[char; 4]> {
    spec.split_whitespace()
        .map(|f| {
            let c: Vec<char> = f.chars().collect();
            assert_eq!(c.len(), 4, "factor {f} needs four labels");
            [c[0], c[1], c[2], c[3]]
        })
        .collect()
}

impl SymTerm {
    /// `factors` is whitespace separated, e.g. `"lpqi jkrl"`.
    pub fn new(coeff: i64, factors: &str, square: &str) -> Self {
        Self { coeff, factors: parse_factors(factors), square: square.chars().collect(), excluded: Vec::new() }
    }

    pub fn excluding(mut self, labels: &str) -> Self {
        self.excluded = labels.chars().collect();
        self
    }

    fn antisymmetrized(&self) -> Vec<char> {
        self.square.iter().copied().filter(|c| !self.excluded.contains(c)).collect()
    }
}

impl SymmetrizedExpression {
    pub fn new(name: &str, round: &str, free: &str, terms: Vec<SymTerm>) -> Self {
        let e = Self { name: name.into(), round: round.chars().collect(), free: free.chars().collect(), terms };
        e.validate();
        e
    }

    fn validate(&self) {
        for t in &self.terms {
            let mut counts = std::collections::BTreeMap::new();
            for f in &t.factors {
                for c in f {
                    *counts.entry(*c).or_insert(0usize) += 1;
                }
            }
            for (c, n) in &counts {
                let expected = if self.round.contains(c) || self.free.contains(c) { 1 } else { 2 };
                assert_eq!(*n, expected, "label {c} in {} appears {n} times", self.name);
            }
            for c in &self.free {
                assert!(counts.contains_key(c), "free label {c} missing in a term of {}", self.name);
            }
            for c in t.antisymmetrized() {
                assert!(self.free.contains(&c), "square label {c} must be free in {}", self.name);
            }
        }
    }

    /// Degree of the polynomial in `x`.
    pub fn degree(&self) -> usize {
        self.round.len()
    }

    /// Components over the free labels, flattened in base 4 (first label most significant).
    pub fn evaluate<T: Ring>(&self, c: &Act<T>, x: &Vec4<T>) -> Vec<T> {
        let full = c.full();
        let nfree = self.free.len();
        let mut total = vec![T::zero(); 4usize.pow(nfree as u32)];
        for term in &self.terms {
            let raw = self.contract(term, &full, x);
            let square = term.antisymmetrized();
            let positions: Vec<usize> = square.iter().map(|c| self.free.iter().position(|f| f == c).unwrap()).collect();
            let perms = signed_permutations(positions.len());
            let coeff = T::from_i64(term.coeff);
            for (flat, out) in total.iter_mut().enumerate() {
                let idx = unflatten(flat, nfree);
                let mut acc = T::zero();
                for (perm, sign) in &perms {
                    let mut src = idx.clone();
                    for (a, &p) in perm.iter().enumerate() {
                        src[positions[a]] = idx[positions[p]];
                    }
                    let v = raw[flatten(&src)].clone();
                    acc = if *sign > 0 { acc + v } else { acc - v };
                }
                *out = out.clone() + coeff.clone() * acc;
            }
        }
        total
    }

    /// Plain contraction of one term, round slots against `x`, before antisymmetrization.
    fn contract<T: Ring>(&self, term: &SymTerm, full: &[T], x: &Vec4<T>) -> Vec<T> {
        // Reduce each factor over its round slots.
        let reduced: Vec<(Vec<char>, Vec<T>)> = term.factors.iter().map(|f| self.reduce_factor(f, full, x)).collect();
        let mut labels: Vec<char> = self.free.clone();
        for (ls, _) in &reduced {
            for c in ls {
                if !labels.contains(c) {
                    labels.push(*c);
                }
            }
        }
        let nfree = self.free.len();
        let nl = labels.len();
        let pos: Vec<Vec<usize>> = reduced
            .iter()
            .map(|(ls, _)| ls.iter().map(|c| labels.iter().position(|l| l == c).unwrap()).collect())
            .collect();
        let mut out = vec![T::zero(); 4usize.pow(nfree as u32)];
        let mut assign = vec![0usize; nl];
        for flat in 0..4usize.pow(nl as u32) {
            let mut r = flat;
            for a in (0..nl).rev() {
                assign[a] = r % 4;
                r /= 4;
            }
            let mut prod = T::one();
            let mut zero = false;
            for ((_, vals), p) in reduced.iter().zip(&pos) {
                let mut k = 0;
                for &q in p {
                    k = k * 4 + assign[q];
                }
                let v = &vals[k];
                if v.is_zero() {
                    zero = true;
                    break;
                }
                prod = prod * v.clone();
            }
            if zero {
                continue;
            }
            let mut f = 0;
            for &a in assign.iter().take(nfree) {
                f = f * 4 + a;
            }
            out[f] = out[f].clone() + prod;
        }
        out
    }

    fn reduce_factor<T: Ring>(&self, f: &[char; 4], full: &[T], x: &Vec4<T>) -> (Vec<char>, Vec<T>) {
        let keep: Vec<usize> = (0..4).filter(|&s| !self.round.contains(&f[s])).collect();
        let labels: Vec<char> = keep.iter().map(|&s| f[s]).collect();
        let mut vals = vec![T::zero(); 4usize.pow(keep.len() as u32)];
        for idx in 0..256usize {
            let d = [idx >> 6 & 3, idx >> 4 & 3, idx >> 2 & 3, idx & 3];
            let cv = &full[idx];
            if cv.is_zero() {
                continue;
            }
            let mut w = cv.clone();
            for s in 0..4 {
                if self.round.contains(&f[s]) {
                    w = w * x[d[s]].clone();
                }
            }
            let mut k = 0;
            for &s in &keep {
                k = k * 4 + d[s];
            }
            vals[k] = vals[k].clone() + w;
        }
        (labels, vals)
    }
}

fn unflatten(mut flat: usize, n: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    for a in (0..n).rev() {
        v[a] = flat % 4;
        flat /= 4;
    }
    v
}

fn flatten(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &d| acc * 4 + d)
}

/// All permutations of `0..n` with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i8)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inv = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if prefix[a] > prefix[b] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `C^l_(pq[i} C_{jk]r)l`
pub fn tsn1() -> SymmetrizedExpression {
    SymmetrizedExpression::new("tsn1", "pqr", "ijk", vec![SymTerm::new(1, "lpqi jkrl", "ijk")])
}

/// `C_l(pq^m C^l_r[ij} C_{k]st)m`
pub fn tsn5() -> SymmetrizedExpression {
    SymmetrizedExpression::new("tsn5", "pqrst", "ijk", vec![SymTerm::new(1, "lpqm lrij kstm", "ijk")])
}

/// `C_l(pq[i} C_j^l_|r|^m C_{k]st)m`
pub fn tsn6() -> SymmetrizedExpression {
    SymmetrizedExpression::new("tsn6", "pqrst", "ijk", vec![SymTerm::new(1, "lpqi jlrm kstm", "ijrk").excluding("r")])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    #[test]
    fn permutation_signs() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| *s as i32).sum::<i32>(), 0);
    }

    #[test]
    fn result_is_antisymmetric() {
        let c = Act::from_slots(&(0..20).map(|i| int((i * 7) % 11 - 5)).collect::<Vec<Rational>>());
        let x = [int(1), int(2), int(-1), int(3)];
        let v = tsn1().evaluate(&c, &x);
        // swap i and j: index (i,j,k) -> (j,i,k)
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(v[i * 16 + j * 4 + k], -v[j * 16 + i * 4 + k].clone());
                }
            }
        }
    }

    #[test]
    #[should_panic]
    fn dangling_label_rejected() {
        SymmetrizedExpression::new("bad", "pq", "i", vec![SymTerm::new(1, "lpqi lmnk", "")]);
    }
}
