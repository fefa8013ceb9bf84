//! Free-group words over the fixed three-letter alphabet {x, y, z}.
//!
//! Words are stored letter by letter (no exponent compression) so that
//! paths through the Cayley graph can be evaluated at integer times by
//! plain prefix truncation.

use std::fmt;

use thiserror::Error;

/// Generator symbols of the fixed alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X,
    Y,
    Z,
}

impl Gen {
    fn lower(self) -> char {
        match self {
            Gen::X => 'x',
            Gen::Y => 'y',
            Gen::Z => 'z',
        }
    }
}

/// A signed generator letter; `inv` marks the formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Gen,
    pub inv: bool,
}

impl Letter {
    pub const fn new(gen: Gen, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub const fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    /// +1 for a plain letter, -1 for an inverse letter.
    pub const fn exp(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }
}

pub const X: Letter = Letter::new(Gen::X, false);
pub const X_INV: Letter = Letter::new(Gen::X, true);
pub const Y: Letter = Letter::new(Gen::Y, false);
pub const Y_INV: Letter = Letter::new(Gen::Y, true);
pub const Z: Letter = Letter::new(Gen::Z, false);
pub const Z_INV: Letter = Letter::new(Gen::Z, true);

/// The symmetric generating set in the fixed enumeration order used by
/// breadth-first searches and sweeps: x, x^-1, y, y^-1, z, z^-1.
pub const GENERATORS: [Letter; 6] = [X, X_INV, Y, Y_INV, Z, Z_INV];

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.gen.lower();
        if self.inv {
            write!(f, "{}", c.to_ascii_uppercase())
        } else {
            write!(f, "{c}")
        }
    }
}

/// A finite sequence of letters, i.e. an element of the free group on
/// {x, y, z} once freely reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {0:?} in word")]
    BadChar(char),
    #[error("'^' must follow a letter and be followed by an integer")]
    BadExponent,
    #[error("exponent magnitude exceeds {0}")]
    ExponentTooLarge(i64),
}

const MAX_EXPONENT: i64 = 1_000_000;

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// w^-1: reversed sequence of inverted letters.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// g^k spelled literally (k may be negative or zero).
    pub fn power(letter: Letter, k: i64) -> Word {
        let l = if k < 0 { letter.inverse() } else { letter };
        Word(std::iter::repeat(l).take(k.unsigned_abs() as usize).collect())
    }

    /// True when no adjacent pair of letters is mutually inverse.
    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].is_inverse_of(w[1]))
    }

    /// The unique freely reduced word equal to this one in the free group.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last().is_some_and(|&top| top.is_inverse_of(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// A cyclically reduced word conjugate to this one: freely reduce,
    /// then strip mutually inverse first/last letters.
    pub fn cyclic_reduce(&self) -> Word {
        let mut v = self.free_reduce().0;
        while v.len() >= 2 && v[0].is_inverse_of(*v.last().unwrap()) {
            v.pop();
            v.remove(0);
        }
        Word(v)
    }

    /// Parse the word syntax used by all CLI commands: letters `x y z`
    /// (uppercase for inverses), optional `^` exponents such as `x^3` or
    /// `y^-2`, whitespace ignored. Any other symbol is rejected.
    pub fn parse(s: &str) -> Result<Word, ParseError> {
        let mut out = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let letter = match c {
                'x' => X,
                'y' => Y,
                'z' => Z,
                'X' => X_INV,
                'Y' => Y_INV,
                'Z' => Z_INV,
                other => return Err(ParseError::BadChar(other)),
            };
            let mut exp: i64 = 1;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut sign = 1i64;
                match chars.peek() {
                    Some('-') => {
                        sign = -1;
                        chars.next();
                    }
                    Some('+') => {
                        chars.next();
                    }
                    _ => {}
                }
                let mut digits = String::new();
                while chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    digits.push(chars.next().unwrap());
                }
                if digits.is_empty() {
                    return Err(ParseError::BadExponent);
                }
                let mag: i64 = digits.parse().map_err(|_| ParseError::ExponentTooLarge(MAX_EXPONENT))?;
                if mag > MAX_EXPONENT {
                    return Err(ParseError::ExponentTooLarge(MAX_EXPONENT));
                }
                exp = sign * mag;
            }
            let total = letter.exp() * exp;
            let base = Letter::new(letter.gen, total < 0);
            for _ in 0..total.unsigned_abs() {
                out.push(base);
            }
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    /// Run-length rendering that round-trips through `Word::parse`:
    /// `x x x` prints as `x^3`, a single inverse letter as `X`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            match l.exp() * run {
                1 => write!(f, "{}", l.gen.lower())?,
                -1 => write!(f, "{}", l.gen.lower().to_ascii_uppercase())?,
                e => write!(f, "{}^{}", l.gen.lower(), e)?,
            }
            i = j;
        }
        Ok(())
    }
}

/// The commutator [a, b] = a b a^-1 b^-1, freely reduced.
pub fn commutator(a: &Word, b: &Word) -> Word {
    a.concat(b)
        .concat(&a.inverse())
        .concat(&b.inverse())
        .free_reduce()
}

/// The witness family [x^n, y^{qn}] * [y^{-qn}, x^{-n}] whose diagrams
/// force cubically many [x, z] cells. Freely reduced, of length 4n(q+1).
pub fn cubic_witness_word(n: u32, q: u32) -> Word {
    let n = n as i64;
    let qn = q as i64 * n;
    let a = Word::power(X, n);
    let b = Word::power(Y, qn);
    let first = commutator(&a, &b);
    let second = commutator(&b.inverse(), &a.inverse());
    first.concat(&second).free_reduce()
}
