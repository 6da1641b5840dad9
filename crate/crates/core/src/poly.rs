//! Exact integer-coefficient polynomials over the eight box parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PolyError;
use crate::nsbox::NSBox;

/// A box parameter, in [`NSBox::to_array`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    M0,
    M1,
    N0,
    N1,
    C1,
    C2,
    C3,
    C4,
}

impl Var {
    pub const ALL: [Var; 8] = [
        Var::M0,
        Var::M1,
        Var::N0,
        Var::N1,
        Var::C1,
        Var::C2,
        Var::C3,
        Var::C4,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        crate::nsbox::PARAM_NAMES[self.index()]
    }

    /// `m_x`.
    pub fn alice(x: usize) -> Var {
        [Var::M0, Var::M1][x]
    }

    /// `n_y`.
    pub fn bob(y: usize) -> Var {
        [Var::N0, Var::N1][y]
    }

    /// `c_{1 + 2x + y} = P(00|xy)`.
    pub fn joint(x: usize, y: usize) -> Var {
        [Var::C1, Var::C2, Var::C3, Var::C4][2 * x + y]
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector over [`Var::ALL`].
pub type Monomial = [u8; 8];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i64>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: i64) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term([0; 8], c);
        p
    }

    pub fn var(v: Var) -> Polynomial {
        let mut m = [0; 8];
        m[v.index()] = 1;
        let mut p = Polynomial::zero();
        p.add_term(m, 1);
        p
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Highest exponent of any single variable.
    pub fn max_var_degree(&self) -> u8 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for v in Var::ALL {
                if m[v.index()] > 0 {
                    s.insert(v);
                }
            }
        }
        s
    }

    /// Constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&[0; 8]).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, k: i64) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, &c) in &self.terms {
            p.add_term(*m, c * k);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[f64; 8]) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| {
                let mut t = c as f64;
                for (i, &e) in m.iter().enumerate() {
                    for _ in 0..e {
                        t *= point[i];
                    }
                }
                t
            })
            .sum()
    }

    pub fn eval_box(&self, b: &NSBox) -> f64 {
        self.eval(&b.to_array())
    }

    /// Replace bound variables by their polynomials.
    pub fn substitute(&self, bindings: &Bindings) -> Result<Polynomial, PolyError> {
        let resolved = bindings.resolve()?;
        Ok(self.substitute_resolved(&resolved))
    }

    fn substitute_resolved(&self, resolved: &BTreeMap<Var, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, &c) in &self.terms {
            let mut term = Polynomial::constant(c);
            let mut rest = [0u8; 8];
            for v in Var::ALL {
                let e = m[v.index()];
                if e == 0 {
                    continue;
                }
                match resolved.get(&v) {
                    Some(p) => term = &term * &p.pow(e as u32),
                    None => rest[v.index()] = e,
                }
            }
            let mut mono = Polynomial::zero();
            mono.add_term(rest, 1);
            out = &out + &(&term * &mono);
        }
        out
    }

    /// `Some(k)` with `k > 0` if `self == k · other`.
    pub fn positive_multiple_of(&self, other: &Polynomial) -> Option<i64> {
        let (m, &c0) = other.terms.iter().next()?;
        let c = self.coefficient(m);
        if c == 0 || c % c0 != 0 {
            return None;
        }
        let k = c / c0;
        (k > 0 && *self == other.scale(k)).then_some(k)
    }

    pub fn compile(&self) -> CompiledPoly {
        let mut coef = Vec::with_capacity(self.terms.len());
        let mut factors = Vec::new();
        let mut ends = Vec::with_capacity(self.terms.len());
        for (m, &c) in &self.terms {
            coef.push(c as f64);
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    factors.push(i as u8);
                }
            }
            ends.push(factors.len() as u32);
        }
        CompiledPoly {
            coef,
            factors,
            ends,
        }
    }

    /// Sorted for display: higher total degree first, then variable order.
    fn display_terms(&self) -> Vec<(&Monomial, i64)> {
        let mut v: Vec<(&Monomial, i64)> = self.terms().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            db.cmp(&da).then_with(|| a.cmp(b))
        });
        v
    }
}

fn monomial_string(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match m[v.index()] {
            0 => {}
            1 => parts.push(v.name().to_string()),
            e => parts.push(format!("{}^{e}", v.name())),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.display_terms().into_iter().enumerate() {
            let mono = monomial_string(m);
            let sign = if c < 0 { "-" } else { "+" };
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (mono.is_empty(), a) {
                (true, _) => write!(f, "{a}")?,
                (false, 1) => f.write_str(&mono)?,
                (false, _) => write!(f, "{a}*{mono}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coefficient: i64,
    exponents: BTreeMap<Var, u8>,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, &c)| TermRepr {
                coefficient: c,
                exponents: Var::ALL
                    .iter()
                    .filter(|v| m[v.index()] > 0)
                    .map(|&v| (v, m[v.index()]))
                    .collect(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(deserializer)?;
        let mut p = Polynomial::zero();
        for t in terms {
            let mut m = [0; 8];
            for (v, e) in t.exponents {
                m[v.index()] = e;
            }
            p.add_term(m, t.coefficient);
        }
        Ok(p)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                let mut m = [0u8; 8];
                for i in 0..8 {
                    m[i] = ma[i] + mb[i];
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Flattened polynomial for fast floating-point evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    coef: Vec<f64>,
    factors: Vec<u8>,
    ends: Vec<u32>,
}

impl CompiledPoly {
    pub fn eval(&self, point: &[f64; 8]) -> f64 {
        let mut start = 0usize;
        let mut sum = 0.0;
        for (c, &end) in self.coef.iter().zip(&self.ends) {
            let mut t = *c;
            for &i in &self.factors[start..end as usize] {
                t *= point[i as usize];
            }
            sum += t;
            start = end as usize;
        }
        sum
    }
}

/// Variable bindings `v → p(v')` used to eliminate equality constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bindings(pub BTreeMap<Var, Polynomial>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn bind(mut self, v: Var, p: Polynomial) -> Bindings {
        self.0.insert(v, p);
        self
    }

    pub fn is_bound(&self, v: Var) -> bool {
        self.0.contains_key(&v)
    }

    /// Expand every binding so its right-hand side mentions no bound
    /// variable. Bindings of a variable to itself are ignored.
    pub fn resolve(&self) -> Result<BTreeMap<Var, Polynomial>, PolyError> {
        let active: BTreeMap<Var, &Polynomial> = self
            .0
            .iter()
            .filter(|(v, p)| **p != Polynomial::var(**v))
            .map(|(v, p)| (*v, p))
            .collect();
        let mut resolved: BTreeMap<Var, Polynomial> = BTreeMap::new();
        // Depth-first with an explicit "in progress" set to catch cycles.
        fn visit(
            v: Var,
            active: &BTreeMap<Var, &Polynomial>,
            resolved: &mut BTreeMap<Var, Polynomial>,
            stack: &mut Vec<Var>,
        ) -> Result<(), PolyError> {
            if resolved.contains_key(&v) {
                return Ok(());
            }
            if stack.contains(&v) {
                let names: Vec<&str> = stack.iter().map(|v| v.name()).collect();
                return Err(PolyError::CyclicBindings(names.join(" -> ")));
            }
            stack.push(v);
            let rhs = active[&v];
            for dep in rhs.variables() {
                if active.contains_key(&dep) {
                    visit(dep, active, resolved, stack)?;
                }
            }
            let expanded = rhs.substitute_resolved(resolved);
            stack.pop();
            resolved.insert(v, expanded);
            Ok(())
        }
        for &v in active.keys() {
            visit(v, &active, &mut resolved, &mut Vec::new())?;
        }
        Ok(resolved)
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, p)| format!("{v} -> {p}")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;

    /// Parses expressions such as `c_3^2+2c_1n_1` or `(c_2-n_1)(-1+m_1+n_1)`:
    /// `+ - * ^`, parentheses, integer literals, and implicit multiplication.
    fn from_str(s: &str) -> Result<Polynomial, PolyError> {
        let mut p = Parser {
            input: s,
            bytes: s.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(out)
    }
}

/// Parse `"lhs <= rhs"` into `lhs − rhs` (so the inequality reads `≤ 0`).
pub fn parse_inequality(s: &str) -> Result<Polynomial, PolyError> {
    let (lhs, rhs) = s.split_once("<=").ok_or_else(|| PolyError::Parse {
        input: s.to_string(),
        pos: 0,
        msg: "expected `<=`".to_string(),
    })?;
    Ok(&lhs.parse::<Polynomial>()? - &rhs.parse::<Polynomial>()?)
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            input: self.input.to_string(),
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(c) if c.is_ascii_digit() || c == b'(' || matches!(c, b'm' | b'n' | b'c') => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, PolyError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos]
            .parse()
            .map_err(|_| self.error("expected integer"))
    }

    fn primary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Polynomial::constant(self.integer()?)),
            Some(c @ (b'm' | b'n' | b'c')) => {
                self.pos += 1;
                if self.bytes.get(self.pos) == Some(&b'_') {
                    self.pos += 1;
                }
                let d = self
                    .bytes
                    .get(self.pos)
                    .copied()
                    .ok_or_else(|| self.error("expected variable index"))?;
                self.pos += 1;
                let v = match (c, d) {
                    (b'm', b'0') => Var::M0,
                    (b'm', b'1') => Var::M1,
                    (b'n', b'0') => Var::N0,
                    (b'n', b'1') => Var::N1,
                    (b'c', b'1') => Var::C1,
                    (b'c', b'2') => Var::C2,
                    (b'c', b'3') => Var::C3,
                    (b'c', b'4') => Var::C4,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("unknown variable"));
                    }
                };
                Ok(Polynomial::var(v))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
