//! Categorial types over {s, np, n} with tones, island markers and keys, and
//! the depth calculation that ties atoms to semgraph sources.
//!
//! Text grammar (left-associative, all connectives equal precedence):
//! `\` `/` `v` (↓) `^` (↑), each optionally suffixed by `$` (modificative) or
//! `&` (coordinative); `d{k1,k2}` before a denominator marks an island;
//! `k{name}` before an atom keys it; `[C | B over A]` is the tower B↑A↓C.
//! An atom may carry a depth as `np2` or `np²`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomName {
    S,
    Np,
    N,
}

impl fmt::Display for AtomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomName::S => "s",
            AtomName::Np => "np",
            AtomName::N => "n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    /// `\`: denominator on the left.
    Under,
    /// `/`: denominator on the right.
    Over,
    /// ↓: denominator on the left.
    Insert,
    /// ↑: denominator on the right.
    Extract,
}

impl Connective {
    pub fn denominator_left(self) -> bool {
        matches!(self, Connective::Under | Connective::Insert)
    }

    fn glyph(self) -> &'static str {
        match self {
            Connective::Under => "\\",
            Connective::Over => "/",
            Connective::Insert => "↓",
            Connective::Extract => "↑",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tone {
    Applicative,
    Modificative,
    Coordinative,
}

pub type KeySet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: AtomName,
    pub depth: Option<u32>,
    pub key: Option<String>,
    /// Occurrence id, assigned by the parsers.
    pub occ: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frac {
    pub conn: Connective,
    pub tone: Tone,
    pub num: SynType,
    pub den: SynType,
    /// δ over the denominator; an empty set blocks every tower.
    pub island: Option<KeySet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SynType {
    Atom(Atom),
    Frac(Box<Frac>),
}

impl SynType {
    pub fn atom(name: AtomName) -> Self {
        SynType::Atom(Atom { name, depth: None, key: None, occ: None })
    }

    pub fn s() -> Self {
        Self::atom(AtomName::S)
    }

    pub fn np() -> Self {
        Self::atom(AtomName::Np)
    }

    pub fn n() -> Self {
        Self::atom(AtomName::N)
    }

    pub fn frac(conn: Connective, tone: Tone, num: SynType, den: SynType) -> Self {
        SynType::Frac(Box::new(Frac { conn, tone, num, den, island: None }))
    }

    /// `left conn right`, placing operands by the connective's orientation.
    pub fn binary(left: SynType, conn: Connective, tone: Tone, right: SynType) -> Self {
        if conn.denominator_left() {
            Self::frac(conn, tone, right, left)
        } else {
            Self::frac(conn, tone, left, right)
        }
    }

    /// The tower B↑A↓C.
    pub fn tower(c: SynType, b: SynType, a: SynType) -> Self {
        let top = Self::frac(Connective::Extract, Tone::Applicative, b, a);
        Self::frac(Connective::Insert, Tone::Applicative, c, top)
    }

    pub fn as_frac(&self) -> Option<&Frac> {
        match self {
            SynType::Frac(f) => Some(f),
            SynType::Atom(_) => None,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            SynType::Atom(a) => Some(a),
            SynType::Frac(_) => None,
        }
    }

    /// For a tower (E↑B)↓F returns (E, B, F).
    pub fn tower_parts(&self) -> Option<(&SynType, &SynType, &SynType)> {
        let f = self.as_frac()?;
        if f.conn != Connective::Insert {
            return None;
        }
        let top = f.den.as_frac()?;
        (top.conn == Connective::Extract).then_some((&top.num, &top.den, &f.num))
    }

    /// Nesting depth of towers along the base spine.
    pub fn tower_height(&self) -> usize {
        match self.tower_parts() {
            Some((_, b, _)) => 1 + b.tower_height(),
            None => 0,
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a));
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            SynType::Atom(a) => f(a),
            SynType::Frac(fr) => {
                // Surface order: left operand first.
                let (l, r) = if fr.conn.denominator_left() { (&fr.den, &fr.num) } else { (&fr.num, &fr.den) };
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
        }
    }

    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> SynType {
        match self {
            SynType::Atom(a) => SynType::Atom(f(a)),
            SynType::Frac(fr) => {
                let (num, den) = if fr.conn.denominator_left() {
                    let den = fr.den.map_atoms(f);
                    (fr.num.map_atoms(f), den)
                } else {
                    let num = fr.num.map_atoms(f);
                    (num, fr.den.map_atoms(f))
                };
                SynType::Frac(Box::new(Frac { num, den, ..(**fr).clone() }))
            }
        }
    }

    /// Numbers atom occurrences from `start` in surface order; returns the
    /// next free number.
    pub fn number_occurrences(&mut self, start: u32) -> u32 {
        let mut next = start;
        *self = self.map_atoms(&mut |a| {
            next += 1;
            Atom { occ: Some(next - 1), ..a.clone() }
        });
        next
    }

    /// Structural equality ignoring depths, keys, islands and occurrences.
    pub fn same_shape(&self, other: &SynType) -> bool {
        match (self, other) {
            (SynType::Atom(a), SynType::Atom(b)) => a.name == b.name,
            (SynType::Frac(a), SynType::Frac(b)) => {
                a.conn == b.conn && a.tone == b.tone && a.num.same_shape(&b.num) && a.den.same_shape(&b.den)
            }
            _ => false,
        }
    }

    /// Copy with every annotation erased.
    pub fn bare(&self) -> SynType {
        self.strip(true)
    }

    /// Copy with δ and k erased (depths and occurrences kept).
    pub fn without_islands(&self) -> SynType {
        self.strip(false)
    }

    fn strip(&self, all: bool) -> SynType {
        match self {
            SynType::Atom(a) => SynType::Atom(Atom {
                name: a.name,
                key: None,
                depth: if all { None } else { a.depth },
                occ: if all { None } else { a.occ },
            }),
            SynType::Frac(f) => SynType::Frac(Box::new(Frac {
                conn: f.conn,
                tone: f.tone,
                num: f.num.strip(all),
                den: f.den.strip(all),
                island: None,
            })),
        }
    }

    /// Any key carried by an atom of this type.
    pub fn key(&self) -> Option<&str> {
        self.atoms().into_iter().find_map(|a| a.key.as_deref())
    }

    fn is_complex(&self) -> bool {
        matches!(self, SynType::Frac(_))
    }
}

/// |A|: the number of distinct depths in d₀,₀(A).
pub fn size(a: &SynType) -> Result<usize> {
    let d = depth_assign(a)?;
    Ok(d.atoms().iter().filter_map(|x| x.depth).collect::<BTreeSet<_>>().len())
}

/// d₀,₀(A).
pub fn depth_assign(a: &SynType) -> Result<SynType> {
    depth_at(a, 0, 0)
}

fn depth_at(a: &SynType, i: u32, j: u32) -> Result<SynType> {
    match a {
        SynType::Atom(at) => Ok(SynType::Atom(Atom { depth: Some(i), ..at.clone() })),
        SynType::Frac(f) => match f.tone {
            Tone::Applicative => Ok(SynType::Frac(Box::new(Frac {
                num: depth_at(&f.num, i, j + 1)?,
                den: depth_at(&f.den, i + j + 1, 0)?,
                ..(**f).clone()
            }))),
            Tone::Modificative => Ok(SynType::Frac(Box::new(Frac {
                num: depth_at(&f.num, i, j)?,
                den: depth_at(&f.den, i, j)?,
                ..(**f).clone()
            }))),
            Tone::Coordinative => {
                let (left, middle, right) = coordinative_operands(a)?;
                let n = size(left)? as u32;
                let inner = f.num.as_frac().unwrap();
                let l = depth_at(left, i + j + 2, n - 1)?;
                let m = depth_at(middle, i, j + 2 * n)?;
                let r = depth_at(right, i + j + 1, 1)?;
                Ok(SynType::Frac(Box::new(Frac {
                    num: SynType::Frac(Box::new(Frac { num: m, den: l, ..inner.clone() })),
                    den: r,
                    ..(**f).clone()
                })))
            }
        },
    }
}

/// Splits A\&A/&A into its three operands, checking the shape.
pub fn coordinative_operands(t: &SynType) -> Result<(&SynType, &SynType, &SynType)> {
    let bad = || Error::ToneShape(t.to_string());
    let f = t.as_frac().ok_or_else(bad)?;
    if f.conn != Connective::Over || f.tone != Tone::Coordinative {
        return Err(bad());
    }
    let inner = f.num.as_frac().ok_or_else(bad)?;
    if inner.conn != Connective::Under || inner.tone != Tone::Coordinative {
        return Err(bad());
    }
    let (l, m, r) = (&inner.den, &inner.num, &f.den);
    if !(l.same_shape(m) && m.same_shape(r)) {
        return Err(bad());
    }
    Ok((l, m, r))
}

/// Checks every coordinative connective sits in a well-formed triple.
pub fn check_tones(t: &SynType) -> Result<()> {
    fn go(t: &SynType, inside_coord: bool) -> Result<()> {
        let Some(f) = t.as_frac() else { return Ok(()) };
        if f.tone == Tone::Coordinative {
            if f.conn == Connective::Over {
                let (l, m, r) = coordinative_operands(t)?;
                for x in [l, m, r] {
                    go(x, false)?;
                }
                return Ok(());
            }
            if !(inside_coord && f.conn == Connective::Under) {
                return Err(Error::ToneShape(t.to_string()));
            }
        }
        go(&f.num, false)?;
        go(&f.den, false)
    }
    go(t, false)
}

/// Every depth taken modulo the sort of the paired semgraph.
pub fn mod_sort_fix(t: &SynType, sort: i64) -> Result<SynType> {
    if sort <= 0 {
        return Err(Error::BadSort(sort));
    }
    Ok(t.map_atoms(&mut |a| Atom { depth: a.depth.map(|d| d % sort as u32), ..a.clone() }))
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(n: u32) -> String {
    n.to_string().chars().map(|c| SUPERSCRIPTS[c.to_digit(10).unwrap() as usize]).collect()
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = &self.key {
            write!(f, "k{{{k}}}")?;
        }
        write!(f, "{}", self.name)?;
        if let Some(d) = self.depth {
            write!(f, "{}", superscript(d))?;
        }
        Ok(())
    }
}

fn write_island(f: &mut fmt::Formatter<'_>, island: &Option<KeySet>) -> fmt::Result {
    if let Some(keys) = island {
        write!(f, "δ")?;
        if !keys.is_empty() {
            write!(f, "{{{}}}", keys.iter().cloned().collect::<Vec<_>>().join(","))?;
        }
    }
    Ok(())
}

impl fmt::Display for SynType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynType::Atom(a) => write!(f, "{a}"),
            SynType::Frac(fr) => {
                let coord = fr.tone == Tone::Coordinative;
                let (l, r) = if fr.conn.denominator_left() { (&fr.den, &fr.num) } else { (&fr.num, &fr.den) };
                let operand = |f: &mut fmt::Formatter<'_>, t: &SynType, paren: bool, is_den: bool| {
                    if is_den {
                        write_island(f, &fr.island)?;
                    }
                    if paren && t.is_complex() {
                        write!(f, "({t})")
                    } else {
                        write!(f, "{t}")
                    }
                };
                let left_paren = coord && !(fr.conn == Connective::Over && fr.num.as_frac().is_some_and(|n| n.tone == Tone::Coordinative))
                    || fr.island.is_some() && fr.conn.denominator_left();
                operand(f, l, left_paren, fr.conn.denominator_left())?;
                write!(f, "{}", fr.conn.glyph())?;
                match fr.tone {
                    Tone::Applicative => {}
                    Tone::Modificative => write!(f, "$")?,
                    Tone::Coordinative => write!(f, "&")?,
                }
                operand(f, r, true, !fr.conn.denominator_left())
            }
        }
    }
}

impl FromStr for SynType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { chars: s.chars().collect(), pos: 0, src: s };
        let t = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        check_tones(&t)?;
        Ok(t)
    }
}

/// Parses one type from the front of `s`, returning it and the number of
/// chars consumed. Parsing stops at the first token that cannot continue it.
pub fn parse_prefix(s: &str) -> Result<(SynType, usize)> {
    let mut p = Parser { chars: s.chars().collect(), pos: 0, src: s };
    let t = p.expr()?;
    check_tones(&t)?;
    Ok((t, p.pos))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::TypeSyntax(format!("{msg} at {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn looking_at(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w: Vec<char> = word.chars().collect();
        self.chars.get(self.pos..self.pos + w.len()) == Some(&w[..])
    }

    fn connective(&mut self) -> Option<Connective> {
        let c = match self.peek()? {
            '\\' => Connective::Under,
            '/' => Connective::Over,
            'v' | '↓' => Connective::Insert,
            '^' | '↑' => Connective::Extract,
            _ => return None,
        };
        self.pos += 1;
        Some(c)
    }

    fn tone(&mut self) -> Tone {
        match self.chars.get(self.pos) {
            Some('$') => {
                self.pos += 1;
                Tone::Modificative
            }
            Some('&') => {
                self.pos += 1;
                Tone::Coordinative
            }
            _ => Tone::Applicative,
        }
    }

    fn expr(&mut self) -> Result<SynType> {
        let (mut left, mut left_island) = self.marked_operand()?;
        while let Some(conn) = self.connective() {
            let tone = self.tone();
            let (right, right_island) = self.marked_operand()?;
            let island = if conn.denominator_left() {
                if right_island.is_some() {
                    return Err(self.err("island marker on a numerator"));
                }
                left_island
            } else {
                if left_island.is_some() {
                    return Err(self.err("island marker on a numerator"));
                }
                right_island
            };
            let mut t = SynType::binary(left, conn, tone, right);
            if let SynType::Frac(f) = &mut t {
                f.island = island;
            }
            left = t;
            left_island = None;
        }
        if left_island.is_some() {
            return Err(self.err("island marker outside a denominator"));
        }
        Ok(left)
    }

    fn keyset(&mut self) -> Result<Vec<String>> {
        if !self.eat('{') {
            return Err(self.err("expected `{`"));
        }
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|&c| c != '}') {
            self.pos += 1;
        }
        if self.pos == self.chars.len() {
            return Err(self.err("unclosed `{`"));
        }
        let body: String = self.chars[start..self.pos].iter().collect();
        self.pos += 1;
        Ok(body.split(',').map(str::trim).filter(|k| !k.is_empty()).map(String::from).collect())
    }

    fn marked_operand(&mut self) -> Result<(SynType, Option<KeySet>)> {
        if self.looking_at("d{") || self.looking_at("δ") {
            if self.eat('δ') {
                let keys = if self.peek() == Some('{') { self.keyset()? } else { Vec::new() };
                return Ok((self.operand()?, Some(keys.into_iter().collect())));
            }
            self.pos += 1;
            let keys = self.keyset()?;
            return Ok((self.operand()?, Some(keys.into_iter().collect())));
        }
        Ok((self.operand()?, None))
    }

    fn operand(&mut self) -> Result<SynType> {
        if self.eat('(') {
            let t = self.expr()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(t);
        }
        if self.eat('[') {
            let c = self.expr()?;
            if !self.eat('|') {
                return Err(self.err("expected `|` in tower"));
            }
            let b = self.expr()?;
            if !self.looking_at("over") {
                return Err(self.err("expected `over` in tower"));
            }
            self.pos += 4;
            let a = self.expr()?;
            if !self.eat(']') {
                return Err(self.err("expected `]`"));
            }
            return Ok(SynType::tower(c, b, a));
        }
        let key = if self.looking_at("k{") {
            self.pos += 1;
            let mut ks = self.keyset()?;
            if ks.len() != 1 {
                return Err(self.err("a key names exactly one key"));
            }
            ks.pop()
        } else {
            None
        };
        self.atom(key)
    }

    fn atom(&mut self, key: Option<String>) -> Result<SynType> {
        self.skip_ws();
        let name = if self.looking_at("np") {
            self.pos += 2;
            AtomName::Np
        } else if self.looking_at("s") {
            self.pos += 1;
            AtomName::S
        } else if self.looking_at("n") {
            self.pos += 1;
            AtomName::N
        } else {
            return Err(self.err("expected an atom"));
        };
        let mut digits = String::new();
        while let Some(&c) = self.chars.get(self.pos) {
            if let Some(d) = c.to_digit(10) {
                digits.push(char::from_digit(d, 10).unwrap());
            } else if let Some(d) = SUPERSCRIPTS.iter().position(|&x| x == c) {
                digits.push(char::from_digit(d as u32, 10).unwrap());
            } else {
                break;
            }
            self.pos += 1;
        }
        let depth = if digits.is_empty() { None } else { Some(digits.parse().unwrap()) };
        Ok(SynType::Atom(Atom { name, depth, key, occ: None }))
    }
}

/// Matches m(A, A′): identically situated atom occurrences of two
/// structurally equal types, as pairs of occurrence ids.
pub fn rule_matches(a: &SynType, b: &SynType) -> Result<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    collect_matches(a, b, &mut out)?;
    Ok(out)
}

fn collect_matches(a: &SynType, b: &SynType, out: &mut Vec<(u32, u32)>) -> Result<()> {
    match (a, b) {
        (SynType::Atom(x), SynType::Atom(y)) if x.name == y.name => {
            out.push((x.occ.unwrap_or(u32::MAX), y.occ.unwrap_or(u32::MAX)));
            Ok(())
        }
        (SynType::Frac(x), SynType::Frac(y)) if x.conn == y.conn && x.tone == y.tone => {
            collect_matches(&x.num, &y.num, out)?;
            collect_matches(&x.den, &y.den, out)
        }
        _ => Err(Error::Mismatch(a.to_string(), b.to_string())),
    }
}

/// Depth of every occurrence in a numbered, depth-assigned type.
pub fn occurrence_depths(t: &SynType) -> HashMap<u32, u32> {
    t.atoms().iter().filter_map(|a| Some((a.occ?, a.depth?))).collect()
}
