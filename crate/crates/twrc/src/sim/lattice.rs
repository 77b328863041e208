//! Idealized nested-lattice codebook.
//!
//! The fine lattice is `Z^n` and the coarse (shaping) lattice is `q Z^n`, so
//! a codeword is a length-`n` vector over `Z_q` and the modulo-lattice
//! reduction is componentwise mod `q`. Messages map to codewords through the
//! bijective base-`q` digit expansion `g` (little-endian digit order).

use crate::error::Error;

/// A codeword of the idealized nested-lattice code: `n` symbols over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeWord {
    q: u32,
    symbols: Vec<u32>,
}

impl LatticeWord {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self, Error> {
        if q < 2 {
            return Err(Error::InvalidWord(format!("modulus must be >= 2, got {q}")));
        }
        if symbols.is_empty() {
            return Err(Error::InvalidWord("word length must be >= 1".to_string()));
        }
        if let Some(s) = symbols.iter().find(|s| **s >= q) {
            return Err(Error::InvalidWord(format!(
                "symbol {s} outside {{0, .., {}}}",
                q - 1
            )));
        }
        Ok(Self { q, symbols })
    }

    pub fn zero(q: u32, n: usize) -> Result<Self, Error> {
        Self::new(q, vec![0; n])
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }
}

/// Number of codewords `q^n`, when it fits in `u128`.
pub fn codebook_size(q: u32, n: usize) -> Option<u128> {
    let exp = u32::try_from(n).ok()?;
    (q as u128).checked_pow(exp)
}

/// Map a message to its codeword: little-endian base-`q` digits of `w`.
pub fn lattice_map_g(w: u64, q: u32, n: usize) -> Result<LatticeWord, Error> {
    if q < 2 {
        return Err(Error::InvalidWord(format!("modulus must be >= 2, got {q}")));
    }
    if n == 0 {
        return Err(Error::InvalidWord("word length must be >= 1".to_string()));
    }
    if let Some(cap) = codebook_size(q, n) {
        if (w as u128) >= cap {
            return Err(Error::MessageRange {
                message: w,
                context: format!("the codebook of {n} base-{q} digits"),
            });
        }
    }
    let mut symbols = vec![0u32; n];
    let mut rest = w;
    for s in symbols.iter_mut() {
        *s = (rest % q as u64) as u32;
        rest /= q as u64;
    }
    LatticeWord::new(q, symbols)
}

/// Invert [`lattice_map_g`] exactly. Total on words, hence the wide return
/// type; pipeline code converts back down after checking `q^n` fits.
pub fn lattice_unmap_g(word: &LatticeWord) -> u128 {
    let mut acc: u128 = 0;
    for &s in word.symbols.iter().rev() {
        acc = acc * word.q as u128 + s as u128;
    }
    acc
}

/// Componentwise `(a + b) mod q`: addition modulo the coarse lattice.
pub fn mod_add(a: &LatticeWord, b: &LatticeWord) -> Result<LatticeWord, Error> {
    check_compatible(a, b)?;
    let symbols = a
        .symbols
        .iter()
        .zip(&b.symbols)
        .map(|(x, y)| ((*x as u64 + *y as u64) % a.q as u64) as u32)
        .collect();
    LatticeWord::new(a.q, symbols)
}

/// Componentwise `(a - b) mod q`; inverts [`mod_add`] by the second operand.
pub fn mod_sub(a: &LatticeWord, b: &LatticeWord) -> Result<LatticeWord, Error> {
    check_compatible(a, b)?;
    let symbols = a
        .symbols
        .iter()
        .zip(&b.symbols)
        .map(|(x, y)| ((*x as u64 + a.q as u64 - *y as u64) % a.q as u64) as u32)
        .collect();
    LatticeWord::new(a.q, symbols)
}

fn check_compatible(a: &LatticeWord, b: &LatticeWord) -> Result<(), Error> {
    if a.q != b.q || a.symbols.len() != b.symbols.len() {
        return Err(Error::WordMismatch {
            q_a: a.q,
            n_a: a.symbols.len(),
            q_b: b.q,
            n_b: b.symbols.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digit_expansion_examples() {
        assert_eq!(lattice_map_g(5, 4, 3).unwrap().symbols(), &[1, 1, 0]);
        assert_eq!(lattice_map_g(0, 4, 3).unwrap(), LatticeWord::zero(4, 3).unwrap());
        assert!(matches!(
            lattice_map_g(64, 4, 3),
            Err(Error::MessageRange { .. })
        ));
        assert!(lattice_map_g(63, 4, 3).is_ok());
    }

    #[test]
    fn word_validation() {
        assert!(LatticeWord::new(1, vec![0]).is_err());
        assert!(LatticeWord::new(3, vec![]).is_err());
        assert!(LatticeWord::new(3, vec![0, 3]).is_err());
        assert!(LatticeWord::new(3, vec![0, 2, 1]).is_ok());
    }

    #[test]
    fn roundtrip_exhaustive_q3_n4() {
        for w in 0..81u64 {
            let word = lattice_map_g(w, 3, 4).unwrap();
            assert_eq!(lattice_unmap_g(&word), w as u128);
        }
    }

    #[test]
    fn modulo_arithmetic_examples() {
        let a = lattice_map_g(5, 4, 3).unwrap(); // (1, 1, 0)
        let b = lattice_map_g(10, 4, 3).unwrap(); // (2, 2, 0)
        let sum = mod_add(&a, &b).unwrap();
        assert_eq!(sum.symbols(), &[3, 3, 0]);
        assert_eq!(lattice_unmap_g(&sum), 15);
        assert_eq!(mod_sub(&sum, &b).unwrap(), a);
        let zero = LatticeWord::zero(4, 3).unwrap();
        assert_eq!(mod_add(&a, &zero).unwrap(), a);
    }

    #[test]
    fn mismatched_words_are_rejected() {
        let a = LatticeWord::zero(4, 3).unwrap();
        let b = LatticeWord::zero(4, 4).unwrap();
        let c = LatticeWord::zero(5, 3).unwrap();
        assert!(matches!(mod_add(&a, &b), Err(Error::WordMismatch { .. })));
        assert!(matches!(mod_add(&a, &c), Err(Error::WordMismatch { .. })));
    }

    #[test]
    fn group_laws_exhaustive_q2_n3() {
        let words: Vec<LatticeWord> = (0..8).map(|w| lattice_map_g(w, 2, 3).unwrap()).collect();
        let zero = LatticeWord::zero(2, 3).unwrap();
        for a in &words {
            assert_eq!(&mod_add(a, &zero).unwrap(), a);
            for b in &words {
                let ab = mod_add(a, b).unwrap();
                assert_eq!(ab, mod_add(b, a).unwrap());
                assert_eq!(&mod_sub(&ab, b).unwrap(), a);
                for c in &words {
                    let bc = mod_add(b, c).unwrap();
                    assert_eq!(mod_add(&ab, c).unwrap(), mod_add(a, &bc).unwrap());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip_random(q in 2u32..16, n in 1usize..12, seed in any::<u64>()) {
            let cap = codebook_size(q, n).unwrap();
            let w = (seed as u128 % cap) as u64;
            let word = lattice_map_g(w, q, n)?;
            prop_assert_eq!(lattice_unmap_g(&word), w as u128);
        }

        #[test]
        fn self_interference_cancellation(
            q in 2u32..16,
            n in 1usize..12,
            s1 in any::<u64>(),
            s2 in any::<u64>(),
        ) {
            // g^{-1}(g(w12) + g(w21) - g(w21)) = w12: the algebraic core of
            // side-information decoding in the broadcast phase.
            let cap = codebook_size(q, n).unwrap();
            let w12 = (s1 as u128 % cap) as u64;
            let w21 = (s2 as u128 % cap) as u64;
            let t12 = lattice_map_g(w12, q, n)?;
            let t21 = lattice_map_g(w21, q, n)?;
            let t0 = mod_add(&t12, &t21)?;
            let recovered = mod_sub(&t0, &t21)?;
            prop_assert_eq!(lattice_unmap_g(&recovered), w12 as u128);
        }
    }
}
