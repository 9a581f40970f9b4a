//! Formal words in generators and their adjoints, and finite linear
//! combinations of words.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dilation::SignedPowerWord;

/// One generator letter: factor id (zero-based) and adjoint flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: usize,
    pub star: bool,
}

impl Letter {
    pub fn new(factor: usize, star: bool) -> Self {
        Self { factor, star }
    }

    pub fn adjoint(self) -> Self {
        Self {
            factor: self.factor,
            star: !self.star,
        }
    }
}

/// Ordered product of letters; the empty word is the unit. Letters act
/// right to left on vectors, the usual operator-product convention.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn unit() -> Self {
        Self::default()
    }

    pub fn letter(factor: usize, star: bool) -> Self {
        Self::new(vec![Letter::new(factor, star)])
    }

    /// `X^k` for `k ≥ 0`, `(X*)^{-k}` for `k < 0`.
    pub fn power(factor: usize, k: i64) -> Self {
        Self::new(vec![Letter::new(factor, k < 0); k.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reverses the letters and flips every adjoint flag.
    pub fn adjoint(&self) -> Self {
        Self::new(self.letters.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(letters)
    }

    /// Maximal runs of letters from one factor, as `(factor, subword)`.
    pub fn blocks(&self) -> Vec<(usize, Word)> {
        let mut out: Vec<(usize, Word)> = Vec::new();
        for &l in &self.letters {
            match out.last_mut() {
                Some((f, w)) if *f == l.factor => w.letters.push(l),
                _ => out.push((l.factor, Word::new(vec![l]))),
            }
        }
        out
    }

    /// Number of alternating runs.
    pub fn alternation_length(&self) -> usize {
        self.blocks().len()
    }

    /// Net exponent `#X − #X*` of a single-factor word.
    pub fn net_exponent(&self) -> i64 {
        self.letters.iter().map(|l| if l.star { -1 } else { 1 }).sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().map(|l| l.factor)
    }

    /// All words of length `1..=max_len` over the letters of `factors` and
    /// their adjoints, shortest first, lexicographic within a length.
    pub fn all_up_to(factors: &[usize], max_len: usize) -> Vec<Word> {
        let mut alphabet: Vec<Letter> = factors
            .iter()
            .flat_map(|&f| [Letter::new(f, false), Letter::new(f, true)])
            .collect();
        alphabet.sort();
        let mut out = Vec::new();
        let mut layer = vec![Word::unit()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * alphabet.len());
            for w in &layer {
                for &l in &alphabet {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word::new(letters));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl From<&SignedPowerWord> for Word {
    fn from(w: &SignedPowerWord) -> Self {
        let mut letters = Vec::new();
        for &(f, k) in &w.letters {
            letters.extend(Word::power(f, k).letters);
        }
        Word::new(letters)
    }
}

impl fmt::Display for Word {
    /// Runs of one letter are written with an exponent: `0^2 1* 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", l.factor, if l.star { "*" } else { "" })?;
            if run > 1 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = String;

    /// Tokens `<factor>[*][^<k>]` separated by whitespace; `e` is the unit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (head, k) = match tok.split_once('^') {
                Some((h, k)) => (h, k.parse::<usize>().map_err(|e| format!("bad exponent in {tok:?}: {e}"))?),
                None => (tok, 1),
            };
            let (id, star) = match head.strip_suffix('*') {
                Some(id) => (id, true),
                None => (head, false),
            };
            let factor = id.parse::<usize>().map_err(|e| format!("bad factor in {tok:?}: {e}"))?;
            letters.extend(std::iter::repeat_n(Letter::new(factor, star), k));
        }
        Ok(Word::new(letters))
    }
}

/// Finite linear combination `Σ c_w w` of words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Element {
    pub terms: Vec<(Complex64, Word)>,
}

impl Element {
    pub fn new(terms: Vec<(Complex64, Word)>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit `1 · e`.
    pub fn unit() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::new(vec![(c, Word::unit())])
    }

    pub fn word(w: Word) -> Self {
        Self::new(vec![(Complex64::new(1.0, 0.0), w)])
    }

    /// `self − c · 1`.
    pub fn minus_scalar(&self, c: Complex64) -> Self {
        let mut terms = self.terms.clone();
        terms.push((-c, Word::unit()));
        Self::new(terms)
    }

    /// Merges repeated words and drops zero coefficients.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<(Complex64, Word)> = Vec::new();
        for (c, w) in &self.terms {
            match out.iter_mut().find(|(_, v)| v == w) {
                Some((acc, _)) => *acc += c,
                None => out.push((*c, w.clone())),
            }
        }
        out.retain(|(c, _)| *c != Complex64::new(0.0, 0.0));
        Self::new(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.terms.iter().map(|(c, w)| (c.conj(), w.adjoint())).collect())
    }

    /// Formal product, expanding term by term.
    pub fn mul(&self, other: &Element) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                terms.push((a * b, u.concat(v)));
            }
        }
        Self::new(terms)
    }

    /// Longest word appearing in the element.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for Element {
    /// `(re,im)[word] + (re,im)[word]`; coefficients use the shortest
    /// representation that parses back to the same `f64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "(0,0)[e]");
        }
        for (n, (c, w)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({},{})[{}]", c.re, c.im, w)?;
        }
        Ok(())
    }
}

impl FromStr for Element {
    type Err = String;

    /// Accepts the [`Display`](fmt::Display) form or a bare word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.contains('[') {
            return Ok(Element::word(s.parse()?));
        }
        let mut terms = Vec::new();
        let mut rest = s;
        loop {
            rest = rest.trim_start();
            let open = rest.strip_prefix('(').ok_or_else(|| format!("expected '(' at {rest:?}"))?;
            let close = open.find(')').ok_or("unterminated coefficient")?;
            let (re, im) = open[..close]
                .split_once(',')
                .ok_or_else(|| format!("coefficient needs re,im: {:?}", &open[..close]))?;
            let c = Complex64::new(
                re.trim().parse().map_err(|e| format!("bad real part {re:?}: {e}"))?,
                im.trim().parse().map_err(|e| format!("bad imaginary part {im:?}: {e}"))?,
            );
            let after = open[close + 1..].trim_start();
            let body = after.strip_prefix('[').ok_or("expected '[' after coefficient")?;
            let end = body.find(']').ok_or("unterminated word")?;
            terms.push((c, body[..end].parse::<Word>()?));
            rest = body[end + 1..].trim_start();
            if rest.is_empty() {
                break;
            }
            rest = rest.strip_prefix('+').ok_or_else(|| format!("expected '+' at {rest:?}"))?;
        }
        Ok(Element::new(terms))
    }
}

/// Parses a product of elements written `{elem}{elem}…`, or a single
/// element / word.
pub fn parse_product(s: &str) -> Result<Vec<Element>, String> {
    let s = s.trim();
    if !s.starts_with('{') {
        return Ok(vec![s.parse()?]);
    }
    let mut out = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let body = rest.strip_prefix('{').ok_or_else(|| format!("expected '{{' at {rest:?}"))?;
        let end = body.find('}').ok_or("unterminated '{'")?;
        out.push(body[..end].parse()?);
        rest = body[end + 1..].trim_start();
    }
    Ok(out)
}

/// Writes a product of elements in the form read by [`parse_product`].
pub fn format_product(elements: &[Element]) -> String {
    elements.iter().map(|e| format!("{{{e}}}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_reverses_and_flips() {
        let w: Word = "0 1* 1".parse().unwrap();
        assert_eq!(w.adjoint().to_string(), "1* 1 0*");
        assert_eq!(w.adjoint().adjoint(), w);
    }

    #[test]
    fn display_and_parse() {
        let w: Word = "0^2 1* 0".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "0^2 1* 0");
        assert_eq!("e".parse::<Word>().unwrap(), Word::unit());
        assert_eq!(Word::unit().to_string(), "e");
        assert!("a".parse::<Word>().is_err());
    }

    #[test]
    fn blocks_merge_same_factor() {
        let w: Word = "0 0* 1 0 1 1*".parse().unwrap();
        let b = w.blocks();
        assert_eq!(b.len(), 4);
        assert_eq!(b[0].1.to_string(), "0 0*");
        assert_eq!(b[3].1.net_exponent(), 0);
    }

    #[test]
    fn signed_power_conversion() {
        let w = Word::from(&SignedPowerWord::new(vec![(0, 2), (1, -1)]));
        assert_eq!(w.to_string(), "0^2 1*");
    }

    #[test]
    fn element_text_roundtrip() {
        let e = Element::new(vec![
            (Complex64::new(0.1, -2.5e-7), "0 1*".parse().unwrap()),
            (Complex64::new(-1.0, 0.0), Word::unit()),
        ]);
        let parsed: Element = e.to_string().parse().unwrap();
        assert_eq!(parsed, e);
        let prod = vec![e.clone(), Element::word("1".parse().unwrap())];
        assert_eq!(parse_product(&format_product(&prod)).unwrap(), prod);
        assert_eq!(parse_product("0 1").unwrap(), vec![Element::word("0 1".parse().unwrap())]);
    }

    #[test]
    fn all_words_count() {
        assert_eq!(Word::all_up_to(&[0, 1], 3).len(), 4 + 16 + 64);
        assert_eq!(Word::all_up_to(&[0], 2).len(), 2 + 4);
    }

    #[test]
    fn element_product_and_simplify() {
        let x = Element::word(Word::letter(0, false)).minus_scalar(Complex64::new(0.5, 0.0));
        let sq = x.mul(&x).simplified();
        // (X − ½)² = X² − X + ¼
        assert_eq!(sq.terms.len(), 3);
        let unit = sq.terms.iter().find(|(_, w)| w.is_empty()).unwrap().0;
        assert_eq!(unit, Complex64::new(0.25, 0.0));
    }
}
