//! Letters, words and variables, each carrying an involution.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite alphabet with an involution `a ↦ ā`.
///
/// Letters are declared in pairs `a/ā`; a lone letter is its own inverse.
/// An alphabet without self-inverse letters is a *group alphabet*
/// `Γ = Σ ∪ Σ̄`, where `Σ` is the first letter of every pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabet {
    names: Vec<String>,
    bar: Vec<Letter>,
    positive: Vec<bool>,
    by_name: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the pair `a/ā` and returns `a`.
    pub fn add_pair(&mut self, a: &str, a_bar: &str) -> Result<Letter> {
        if a == a_bar {
            return self.add_self_inverse(a);
        }
        self.check_fresh(a)?;
        self.check_fresh(a_bar)?;
        let x = Letter(self.names.len() as u32);
        let y = Letter(x.0 + 1);
        self.push(a, y, true);
        self.push(a_bar, x, false);
        Ok(x)
    }

    pub fn add_self_inverse(&mut self, a: &str) -> Result<Letter> {
        self.check_fresh(a)?;
        let x = Letter(self.names.len() as u32);
        self.push(a, x, true);
        Ok(x)
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if name.is_empty() || self.by_name.contains_key(name) {
            return Err(Error::UnknownSymbol(format!("letter {name:?} is empty or declared twice")));
        }
        Ok(())
    }

    fn push(&mut self, name: &str, bar: Letter, positive: bool) {
        let id = Letter(self.names.len() as u32);
        self.names.push(name.to_string());
        self.bar.push(bar);
        self.positive.push(positive);
        self.by_name.insert(name.to_string(), id);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u32).map(Letter)
    }

    /// The first letter of every declared pair (and every self-inverse letter).
    pub fn positives(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters().filter(|a| self.positive[a.index()])
    }

    pub fn bar(&self, a: Letter) -> Letter {
        self.bar[a.index()]
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.by_name.get(name).copied()
    }

    pub fn is_group(&self) -> bool {
        self.letters().all(|a| self.bar(a) != a)
    }

    /// Returns an error naming a self-inverse letter, if there is one.
    pub fn require_group(&self) -> Result<()> {
        match self.letters().find(|&a| self.bar(a) == a) {
            Some(a) => Err(Error::NonGroupAlphabet(self.name(a).to_string())),
            None => Ok(()),
        }
    }

    /// Splits `text` into letters: whitespace separates tokens, and a token
    /// that is not itself a letter name is split by longest match.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if let Some(a) = self.letter(token) {
                out.push(a);
                continue;
            }
            let mut rest = token;
            while !rest.is_empty() {
                let best = rest
                    .char_indices()
                    .map(|(i, c)| i + c.len_utf8())
                    .filter(|&end| self.by_name.contains_key(&rest[..end]))
                    .max()
                    .ok_or_else(|| Error::UnknownLetter(rest.to_string()))?;
                out.push(self.by_name[&rest[..best]]);
                rest = &rest[best..];
            }
        }
        Ok(Word(out))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.0.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(" ")
    }

    /// Declaration line in the text formats, e.g. `alphabet a/ā b/b̄ c`.
    pub fn declaration(&self) -> String {
        let mut parts = vec!["alphabet".to_string()];
        for a in self.positives() {
            let b = self.bar(a);
            if a == b {
                parts.push(self.name(a).to_string());
            } else {
                parts.push(format!("{}/{}", self.name(a), self.name(b)));
            }
        }
        parts.join(" ")
    }
}

/// A word over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// `w̄ = ā_n ⋯ ā_1`.
    pub fn inverse(&self, alphabet: &Alphabet) -> Word {
        Word(self.0.iter().rev().map(|&a| alphabet.bar(a)).collect())
    }

    /// `w[α, β]` for `α ≤ β`, and the inverse of `w[β, α]` otherwise.
    pub fn factor(&self, alphabet: &Alphabet, from: usize, to: usize) -> Word {
        if from <= to {
            Word(self.0[from..to].to_vec())
        } else {
            Word(self.0[to..from].to_vec()).inverse(alphabet)
        }
    }

    pub fn count(&self, a: Letter) -> usize {
        self.0.iter().filter(|&&b| b == a).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn contains_factor(&self, pattern: &Word) -> bool {
        pattern.is_empty() || self.0.windows(pattern.len()).any(|w| w == pattern.0.as_slice())
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> VarRef {
        VarRef { var: self, bar: false }
    }

    pub fn neg(self) -> VarRef {
        VarRef { var: self, bar: true }
    }
}

/// An element of `Ω = Ω₊ ∪ Ω̄₊`: a positive variable, possibly barred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub var: Var,
    pub bar: bool,
}

impl VarRef {
    pub fn inverse(self) -> VarRef {
        VarRef { var: self.var, bar: !self.bar }
    }

    /// Applies an extra bar when `flip` is set.
    pub fn flipped(self, flip: bool) -> VarRef {
        VarRef { var: self.var, bar: self.bar ^ flip }
    }
}

/// Display helper that renders a `VarRef` with its variable name.
pub struct Named<'a> {
    pub name: &'a str,
    pub bar: bool,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bar {
            write!(f, "~{}", self.name)
        } else {
            f.write_str(self.name)
        }
    }
}

/// `[A-Z][A-Za-z0-9_]*`
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Alphabet {
        let mut al = Alphabet::new();
        al.add_pair("a", "ā").unwrap();
        al.add_pair("b", "b̄").unwrap();
        al.add_pair("c", "c̄").unwrap();
        al
    }

    #[test]
    fn bar_is_an_involution() {
        let mut al = abc();
        al.add_self_inverse("t").unwrap();
        for a in al.letters() {
            assert_eq!(al.bar(al.bar(a)), a);
        }
        assert!(!al.is_group());
        assert!(abc().is_group());
    }

    #[test]
    fn parse_word_splits_combining_marks() {
        let al = abc();
        let w = al.parse_word("bcbc̄b̄b̄abc").unwrap();
        assert_eq!(w.len(), 9);
        assert_eq!(al.format_word(&w), "b c b c̄ b̄ b̄ a b c");
        assert_eq!(al.parse_word("b c").unwrap().len(), 2);
        assert!(al.parse_word("bz").is_err());
    }

    #[test]
    fn reversed_factor_is_inverse() {
        let al = abc();
        let w = al.parse_word("abc").unwrap();
        assert_eq!(al.format_word(&w.factor(&al, 3, 1)), "c̄ b̄");
        assert_eq!(w.factor(&al, 1, 1), Word::empty());
    }

    #[test]
    fn duplicate_letters_rejected() {
        let mut al = abc();
        assert!(al.add_pair("a", "x").is_err());
    }
}
