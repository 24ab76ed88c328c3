//! Scenario syntax: a hand-written, line-oriented recursive-descent parser.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::cioper::MonomialCi;
use crate::exactla::Field;
use crate::gralg::{Algebra, Polynomial, DEFAULT_DEGREE_CAP};

/// Source position (1-based). Ignored by equality so printed-and-reparsed ASTs compare equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{loc}: {message}")]
pub struct ParseError {
    pub loc: Loc,
    pub message: String,
}

fn err<T>(loc: Loc, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        loc,
        message: message.into(),
    })
}

pub type Matrix = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleDef {
    Coker { ring: String, matrix: Matrix, degrees: Vec<i64> },
    Residue { ring: String },
    Kchi { ring: String, j: i64 },
    Cut { module: String, j: i64 },
    Syzygy { module: String, i: i64 },
    Sum { left: String, right: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Range(i64, i64),
    Names(Vec<String>),
    Ints(Vec<i64>),
    Matrices(Vec<Matrix>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub key: String,
    pub value: ParamValue,
    pub loc: Loc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Betti,
    Complexity,
    Ext,
    Tor,
    VerifyComplex,
    Reduce,
    ProjdimCheck,
    Symmetry,
    Vartest,
    Testci,
}

impl TaskKind {
    const ALL: [(TaskKind, &'static str); 10] = [
        (TaskKind::Betti, "betti"),
        (TaskKind::Complexity, "complexity"),
        (TaskKind::Ext, "ext"),
        (TaskKind::Tor, "tor"),
        (TaskKind::VerifyComplex, "verify-complex"),
        (TaskKind::Reduce, "reduce"),
        (TaskKind::ProjdimCheck, "projdim-check"),
        (TaskKind::Symmetry, "symmetry"),
        (TaskKind::Vartest, "vartest"),
        (TaskKind::Testci, "testci"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).expect("listed").1
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().find(|(_, n)| *n == s).map(|(k, _)| *k)
    }

    /// Positional arguments, whether each names a ring (true) or a module.
    fn positional(self) -> &'static [bool] {
        match self {
            TaskKind::Betti | TaskKind::Complexity | TaskKind::Reduce | TaskKind::ProjdimCheck => &[false],
            TaskKind::Vartest | TaskKind::Testci => &[false],
            TaskKind::Ext | TaskKind::Tor | TaskKind::Symmetry => &[false, false],
            TaskKind::VerifyComplex => &[true],
        }
    }

    /// (key, required)
    fn params(self) -> &'static [(&'static str, bool)] {
        match self {
            TaskKind::Betti | TaskKind::Ext | TaskKind::Tor => &[("maxdeg", true)],
            TaskKind::Complexity => &[("maxdeg", false), ("s", false)],
            TaskKind::VerifyComplex => &[("matrices", true), ("range", true), ("degrees", false)],
            TaskKind::Reduce => &[("maxdeg", true), ("budget", false)],
            TaskKind::ProjdimCheck => &[("maxdeg", false)],
            TaskKind::Symmetry => &[("maxdeg", false), ("tail", false)],
            TaskKind::Vartest => &[("tests", true), ("t", true), ("maxdeg", false), ("tail", false)],
            TaskKind::Testci => &[("t", true), ("q", true), ("n", true), ("tests", true), ("count", false)],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Field { p: u64, loc: Loc },
    Ring { name: String, vars: Vec<String>, relations: Vec<String>, loc: Loc },
    Module { name: String, def: ModuleDef, loc: Loc },
    Task { kind: TaskKind, args: Vec<String>, params: Vec<Param>, loc: Loc },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub items: Vec<Item>,
}

impl Scenario {
    pub fn field(&self) -> u64 {
        match self.items.first() {
            Some(Item::Field { p, .. }) => *p,
            _ => unreachable!("validated scenarios start with a field"),
        }
    }

    pub fn tasks(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| matches!(i, Item::Task { .. }))
    }

    pub fn ring(&self, name: &str) -> Option<(&[String], &[String])> {
        self.items.iter().find_map(|i| match i {
            Item::Ring {
                name: n, vars, relations, ..
            } if n == name => Some((vars.as_slice(), relations.as_slice())),
            _ => None,
        })
    }

    pub fn module(&self, name: &str) -> Option<&ModuleDef> {
        self.items.iter().find_map(|i| match i {
            Item::Module { name: n, def, .. } if n == name => Some(def),
            _ => None,
        })
    }
}

impl Param {
    pub fn int(&self) -> i64 {
        match self.value {
            ParamValue::Int(v) => v,
            _ => unreachable!("validated"),
        }
    }
}

pub fn param<'a>(params: &'a [Param], key: &str) -> Option<&'a Param> {
    params.iter().find(|p| p.key == key)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    depth: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            depth: 0,
        }
    }

    fn loc(&self) -> Loc {
        Loc {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skips blanks and comments; newlines too when inside brackets.
    fn skip(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\n' if self.depth > 0 => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn skip_blank_lines(&mut self) {
        loop {
            self.skip();
            if self.peek() == Some('\n') {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some('\n') => "end of line".into(),
            Some(c) => format!("'{c}'"),
        }
    }

    fn expect_char(&mut self, want: char) -> Result<(), ParseError> {
        self.skip();
        if self.peek() == Some(want) {
            self.bump();
            match want {
                '[' | '(' => self.depth += 1,
                ']' | ')' => self.depth -= 1,
                _ => {}
            }
            Ok(())
        } else {
            err(self.loc(), format!("expected '{want}', found {}", self.describe()))
        }
    }

    fn eat_char(&mut self, want: char) -> bool {
        self.skip();
        if self.peek() == Some(want) {
            self.expect_char(want).is_ok()
        } else {
            false
        }
    }

    fn word(&mut self) -> Option<(String, Loc)> {
        self.skip();
        let loc = self.loc();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        (!s.is_empty()).then_some((s, loc))
    }

    fn ident(&mut self, what: &str) -> Result<(String, Loc), ParseError> {
        self.skip();
        let loc = self.loc();
        match self.word() {
            Some((w, l)) if w.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && !w.contains('-') => Ok((w, l)),
            _ => err(loc, format!("expected {what}, found {}", self.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Loc, ParseError> {
        self.skip();
        let loc = self.loc();
        let save = (self.pos, self.line, self.col);
        match self.word() {
            Some((w, _)) if w == kw => Ok(loc),
            _ => {
                (self.pos, self.line, self.col) = save;
                err(loc, format!("expected '{kw}', found {}", self.describe()))
            }
        }
    }

    fn int(&mut self) -> Result<(i64, Loc), ParseError> {
        self.skip();
        let loc = self.loc();
        let mut s = String::new();
        if self.peek() == Some('-') {
            s.push('-');
            self.bump();
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        match s.parse() {
            Ok(v) => Ok((v, loc)),
            Err(_) => err(loc, format!("expected an integer, found {}", self.describe())),
        }
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        self.skip();
        match self.peek() {
            None => Ok(()),
            Some('\n') => {
                self.bump();
                Ok(())
            }
            _ => err(self.loc(), format!("expected end of line, found {}", self.describe())),
        }
    }

    /// A polynomial: everything up to a top-level ',' or closing bracket, whitespace removed.
    fn poly(&mut self) -> Result<(String, Loc), ParseError> {
        self.skip();
        let loc = self.loc();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            match c {
                ',' | ']' | ')' => break,
                '[' | '(' => return err(self.loc(), format!("unexpected '{c}' inside a polynomial")),
                '#' => self.skip(),
                c if c.is_whitespace() => {
                    self.bump();
                }
                c => {
                    s.push(c);
                    self.bump();
                }
            }
        }
        if s.is_empty() {
            return err(loc, format!("expected a polynomial, found {}", self.describe()));
        }
        Ok((s, loc))
    }

    fn list<T>(&mut self, open: char, close: char, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        self.expect_char(open)?;
        let mut out = Vec::new();
        if self.eat_char(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            self.skip();
            if self.eat_char(',') {
                continue;
            }
            self.expect_char(close)?;
            return Ok(out);
        }
    }

    fn matrix(&mut self) -> Result<(Matrix, Vec<Loc>), ParseError> {
        let mut locs = Vec::new();
        let rows = self.list('[', ']', |p| {
            p.list('[', ']', |p| {
                let (s, l) = p.poly()?;
                locs.push(l);
                Ok(s)
            })
        })?;
        Ok((rows, locs))
    }

    fn param_value(&mut self, key: &str) -> Result<ParamValue, ParseError> {
        self.skip();
        match key {
            "matrices" => {
                let ms = self.list('[', ']', |p| p.matrix().map(|(m, _)| m))?;
                Ok(ParamValue::Matrices(ms))
            }
            "degrees" => Ok(ParamValue::Ints(self.list('[', ']', |p| p.int().map(|x| x.0))?)),
            "tests" => {
                let mut names = vec![self.ident("a module name")?.0];
                while self.peek() == Some(',') {
                    self.bump();
                    names.push(self.ident("a module name")?.0);
                }
                Ok(ParamValue::Names(names))
            }
            "range" => {
                let (a, _) = self.int()?;
                self.skip();
                let loc = self.loc();
                if !(self.peek() == Some('.') && self.chars.get(self.pos + 1) == Some(&'.')) {
                    return err(loc, format!("expected '..', found {}", self.describe()));
                }
                self.bump();
                self.bump();
                let (b, _) = self.int()?;
                Ok(ParamValue::Range(a, b))
            }
            _ => Ok(ParamValue::Int(self.int()?.0)),
        }
    }

    fn key_int(&mut self, key: &str) -> Result<(i64, Loc), ParseError> {
        self.keyword(key)?;
        self.expect_char('=')?;
        self.int()
    }
}

struct Names {
    kinds: HashMap<String, (bool, Loc)>,
}

impl Names {
    fn declare(&mut self, name: &str, is_ring: bool, loc: Loc) -> Result<(), ParseError> {
        if let Some((_, first)) = self.kinds.get(name) {
            return err(loc, format!("'{name}' is already defined at {first}"));
        }
        self.kinds.insert(name.to_string(), (is_ring, loc));
        Ok(())
    }

    fn require(&self, name: &str, want_ring: bool, loc: Loc) -> Result<(), ParseError> {
        match self.kinds.get(name) {
            None => err(loc, format!("unknown name '{name}'")),
            Some((is_ring, _)) if *is_ring != want_ring => {
                err(loc, format!("'{name}' is not a {}", if want_ring { "ring" } else { "module" }))
            }
            _ => Ok(()),
        }
    }
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut p = Parser::new(text);
    let mut items = Vec::new();
    let mut names = Names { kinds: HashMap::new() };
    let mut rings: HashMap<String, std::sync::Arc<Algebra>> = HashMap::new();
    let mut module_ring: HashMap<String, String> = HashMap::new();
    p.skip_blank_lines();
    let loc = p.keyword("field")?;
    p.keyword("p")?;
    p.expect_char('=')?;
    let (pv, ploc) = p.int()?;
    let field = u64::try_from(pv)
        .ok()
        .and_then(|v| Field::new(v).ok())
        .ok_or_else(|| ParseError {
            loc: ploc,
            message: format!("{pv} is not a prime below 2^31"),
        })?;
    p.end_of_statement()?;
    items.push(Item::Field { p: pv as u64, loc });
    loop {
        p.skip_blank_lines();
        if p.peek().is_none() {
            break;
        }
        let (kw, loc) = p.word().ok_or_else(|| ParseError {
            loc: p.loc(),
            message: format!("expected 'ring', 'module' or 'task', found {}", p.describe()),
        })?;
        let item = match kw.as_str() {
            "ring" => parse_ring(&mut p, loc, field, &mut names, &mut rings)?,
            "module" => parse_module(&mut p, loc, &mut names, &rings, &mut module_ring)?,
            "task" => parse_task(&mut p, loc, &names, &rings, &module_ring)?,
            "field" => return err(loc, "the field may only be declared once"),
            other => return err(loc, format!("expected 'ring', 'module' or 'task', found '{other}'")),
        };
        p.end_of_statement()?;
        items.push(item);
    }
    Ok(Scenario { items })
}

fn parse_ring(
    p: &mut Parser,
    loc: Loc,
    field: Field,
    names: &mut Names,
    rings: &mut HashMap<String, std::sync::Arc<Algebra>>,
) -> Result<Item, ParseError> {
    let (name, nloc) = p.ident("a ring name")?;
    p.expect_char('=')?;
    let mut var_locs = Vec::new();
    let vars = p.list('[', ']', |p| {
        let (v, l) = p.ident("a variable name")?;
        var_locs.push(l);
        Ok(v)
    })?;
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return err(var_locs[i], format!("duplicate variable '{v}'"));
        }
    }
    p.expect_char('/')?;
    let mut rel_locs = Vec::new();
    let relations = p.list('(', ')', |p| {
        let (s, l) = p.poly()?;
        rel_locs.push(l);
        Ok(s)
    })?;
    let mut polys = Vec::new();
    for (r, l) in relations.iter().zip(&rel_locs) {
        polys.push(Polynomial::parse(r, &vars, field).or_else(|e| err(*l, e.to_string()))?);
    }
    let algebra = Algebra::build(field, vars.clone(), polys, DEFAULT_DEGREE_CAP).or_else(|e| err(loc, format!("ring '{name}': {e}")))?;
    names.declare(&name, true, nloc)?;
    rings.insert(name.clone(), algebra);
    Ok(Item::Ring {
        name,
        vars,
        relations,
        loc,
    })
}

fn parse_module(
    p: &mut Parser,
    loc: Loc,
    names: &mut Names,
    rings: &HashMap<String, std::sync::Arc<Algebra>>,
    module_ring: &mut HashMap<String, String>,
) -> Result<Item, ParseError> {
    let (name, nloc) = p.ident("a module name")?;
    p.expect_char('=')?;
    let (form, floc) = p.word().ok_or_else(|| ParseError {
        loc: p.loc(),
        message: format!("expected a module form (coker, k, kchi, cut, syzygy, sum), found {}", p.describe()),
    })?;
    let ring_ref = |p: &mut Parser| -> Result<String, ParseError> {
        let (r, l) = p.ident("a ring name")?;
        names.require(&r, true, l)?;
        Ok(r)
    };
    let module_ref = |p: &mut Parser| -> Result<(String, String), ParseError> {
        let (m, l) = p.ident("a module name")?;
        names.require(&m, false, l)?;
        let ring = module_ring[&m].clone();
        Ok((m, ring))
    };
    let ci_check = |ring: &str, at: Loc| -> Result<(), ParseError> {
        MonomialCi::detect(&rings[ring]).map(|_| ()).or_else(|e| err(at, format!("ring '{ring}': {e}")))
    };
    let (def, ring) = match form.as_str() {
        "coker" => {
            let ring = ring_ref(p)?;
            p.skip();
            let mloc = p.loc();
            let (matrix, locs) = p.matrix()?;
            let width = matrix.first().map_or(0, Vec::len);
            if matrix.is_empty() || matrix.iter().any(|r| r.len() != width) {
                return err(mloc, "matrix rows must be nonempty and of equal length");
            }
            let algebra = &rings[&ring];
            for (s, l) in matrix.iter().flatten().zip(&locs) {
                Polynomial::parse(s, algebra.var_names(), algebra.field()).or_else(|e| err(*l, e.to_string()))?;
            }
            p.keyword("degrees")?;
            p.skip();
            let dloc = p.loc();
            let degrees = p.list('[', ']', |p| p.int().map(|x| x.0))?;
            if degrees.len() != matrix.len() {
                return err(dloc, format!("expected {} degrees, one per row", matrix.len()));
            }
            (ModuleDef::Coker { ring: ring.clone(), matrix, degrees }, ring)
        }
        "k" => {
            let ring = ring_ref(p)?;
            (ModuleDef::Residue { ring: ring.clone() }, ring)
        }
        "kchi" => {
            let ring = ring_ref(p)?;
            ci_check(&ring, floc)?;
            let (j, jl) = p.key_int("j")?;
            let c = rings[&ring].nvars() as i64;
            if j < 1 || j > c {
                return err(jl, format!("j must lie in 1..={c}"));
            }
            (ModuleDef::Kchi { ring: ring.clone(), j }, ring)
        }
        "cut" => {
            let (module, ring) = module_ref(p)?;
            ci_check(&ring, floc)?;
            let (j, jl) = p.key_int("j")?;
            let c = rings[&ring].nvars() as i64;
            if j < 1 || j > c {
                return err(jl, format!("j must lie in 1..={c}"));
            }
            (ModuleDef::Cut { module, j }, ring)
        }
        "syzygy" => {
            let (module, ring) = module_ref(p)?;
            let (i, il) = p.key_int("i")?;
            if i < 0 {
                return err(il, "i must be nonnegative");
            }
            (ModuleDef::Syzygy { module, i }, ring)
        }
        "sum" => {
            let (left, ring) = module_ref(p)?;
            let (right, other) = module_ref(p)?;
            if ring != other {
                return err(floc, format!("'{left}' and '{right}' live over different rings"));
            }
            (ModuleDef::Sum { left, right }, ring)
        }
        other => {
            return err(
                floc,
                format!("expected a module form (coker, k, kchi, cut, syzygy, sum), found '{other}'"),
            )
        }
    };
    names.declare(&name, false, nloc)?;
    module_ring.insert(name.clone(), ring);
    Ok(Item::Module { name, def, loc })
}

fn parse_task(
    p: &mut Parser,
    loc: Loc,
    names: &Names,
    rings: &HashMap<String, std::sync::Arc<Algebra>>,
    module_ring: &HashMap<String, String>,
) -> Result<Item, ParseError> {
    p.skip();
    let kloc = p.loc();
    let (kw, _) = p.word().ok_or_else(|| ParseError {
        loc: kloc,
        message: format!("expected a task name, found {}", p.describe()),
    })?;
    let kind = TaskKind::from_name(&kw).ok_or_else(|| ParseError {
        loc: kloc,
        message: format!("unknown task '{kw}'"),
    })?;
    let mut args = Vec::new();
    let mut arg_ring = None;
    for &is_ring in kind.positional() {
        let (a, l) = p.ident(if is_ring { "a ring name" } else { "a module name" })?;
        names.require(&a, is_ring, l)?;
        let ring = if is_ring { a.clone() } else { module_ring[&a].clone() };
        if arg_ring.get_or_insert_with(|| ring.clone()) != &ring {
            return err(l, format!("'{a}' lives over a different ring"));
        }
        args.push(a);
    }
    let ring = arg_ring.expect("every task has a positional argument");
    let mut params: Vec<Param> = Vec::new();
    loop {
        p.skip();
        if matches!(p.peek(), None | Some('\n')) {
            break;
        }
        let (key, kl) = p.ident("a parameter")?;
        if !kind.params().iter().any(|(k, _)| *k == key) {
            return err(kl, format!("task '{}' takes no parameter '{key}'", kind.name()));
        }
        if params.iter().any(|q| q.key == key) {
            return err(kl, format!("parameter '{key}' given twice"));
        }
        p.expect_char('=')?;
        let value = p.param_value(&key)?;
        params.push(Param { key, value, loc: kl });
    }
    for &(k, required) in kind.params() {
        if required && param(&params, k).is_none() {
            return err(loc, format!("task '{}' needs parameter '{k}'", kind.name()));
        }
    }
    validate_params(kind, &params, names, rings, module_ring, &ring)?;
    Ok(Item::Task { kind, args, params, loc })
}

fn validate_params(
    kind: TaskKind,
    params: &[Param],
    names: &Names,
    rings: &HashMap<String, std::sync::Arc<Algebra>>,
    module_ring: &HashMap<String, String>,
    ring: &str,
) -> Result<(), ParseError> {
    let algebra = &rings[ring];
    for q in params {
        match (&q.key[..], &q.value) {
            ("maxdeg" | "s" | "budget" | "tail" | "count", ParamValue::Int(v)) => {
                let lo = if q.key == "s" || q.key == "budget" { 1 } else { 0 };
                if *v < lo || *v > 200 {
                    return err(q.loc, format!("{} must lie in {lo}..=200", q.key));
                }
                if kind == TaskKind::Reduce && q.key == "maxdeg" && *v < 1 {
                    return err(q.loc, "maxdeg must be at least 1");
                }
            }
            ("t", ParamValue::Int(v)) => {
                let c = algebra.codimension() as i64;
                if kind == TaskKind::Testci && (*v < 1 || *v > c) {
                    return err(q.loc, format!("t must lie in 1..={c}"));
                }
                if *v < 0 {
                    return err(q.loc, "t must be nonnegative");
                }
            }
            ("q", ParamValue::Int(v)) if *v < 1 || v % 2 == 0 => return err(q.loc, "q must be odd and positive"),
            ("n", ParamValue::Int(v)) if *v < 2 || v % 2 != 0 => return err(q.loc, "n must be even and positive"),
            ("q" | "n", ParamValue::Int(_)) => {}
            ("range", ParamValue::Range(a, b)) => {
                if b < a {
                    return err(q.loc, "range end precedes its start");
                }
                if let Some(ParamValue::Matrices(ms)) = param(params, "matrices").map(|m| &m.value) {
                    if ms.len() as i64 != b - a + 1 {
                        return err(q.loc, format!("range covers {} matrices but {} are given", b - a + 1, ms.len()));
                    }
                }
            }
            ("matrices", ParamValue::Matrices(ms)) => {
                if ms.is_empty() {
                    return err(q.loc, "at least one matrix is required");
                }
                for m in ms {
                    let width = m.first().map_or(0, Vec::len);
                    if m.is_empty() || m.iter().any(|r| r.len() != width) {
                        return err(q.loc, "matrix rows must be nonempty and of equal length");
                    }
                    for s in m.iter().flatten() {
                        Polynomial::parse(s, algebra.var_names(), algebra.field())
                            .or_else(|e| err(q.loc, format!("in '{s}': {e}")))?;
                    }
                }
            }
            ("degrees", ParamValue::Ints(_)) => {}
            ("tests", ParamValue::Names(ns)) => {
                for n in ns {
                    names.require(n, false, q.loc)?;
                    if module_ring[n] != ring {
                        return err(q.loc, format!("'{n}' lives over a different ring"));
                    }
                }
            }
            _ => return err(q.loc, format!("malformed value for '{}'", q.key)),
        }
    }
    if kind == TaskKind::Testci {
        MonomialCi::detect(algebra).or_else(|e| err(params[0].loc, format!("ring '{ring}': {e}")))?;
    }
    Ok(())
}

fn write_matrix(f: &mut fmt::Formatter<'_>, m: &Matrix) -> fmt::Result {
    let rows: Vec<String> = m.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    write!(f, "[{}]", rows.join(", "))
}

fn write_ints(f: &mut fmt::Formatter<'_>, v: &[i64]) -> fmt::Result {
    let s: Vec<String> = v.iter().map(i64::to_string).collect();
    write!(f, "[{}]", s.join(", "))
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match item {
                Item::Field { p, .. } => writeln!(f, "field p = {p}")?,
                Item::Ring {
                    name, vars, relations, ..
                } => writeln!(f, "ring {name} = [{}] / ({})", vars.join(", "), relations.join(", "))?,
                Item::Module { name, def, .. } => {
                    write!(f, "module {name} = ")?;
                    match def {
                        ModuleDef::Coker { ring, matrix, degrees } => {
                            write!(f, "coker {ring} ")?;
                            write_matrix(f, matrix)?;
                            write!(f, " degrees ")?;
                            write_ints(f, degrees)?;
                        }
                        ModuleDef::Residue { ring } => write!(f, "k {ring}")?,
                        ModuleDef::Kchi { ring, j } => write!(f, "kchi {ring} j={j}")?,
                        ModuleDef::Cut { module, j } => write!(f, "cut {module} j={j}")?,
                        ModuleDef::Syzygy { module, i } => write!(f, "syzygy {module} i={i}")?,
                        ModuleDef::Sum { left, right } => write!(f, "sum {left} {right}")?,
                    }
                    writeln!(f)?;
                }
                Item::Task { kind, args, params, .. } => {
                    write!(f, "task {} {}", kind.name(), args.join(" "))?;
                    for q in params {
                        write!(f, " {}=", q.key)?;
                        match &q.value {
                            ParamValue::Int(v) => write!(f, "{v}")?,
                            ParamValue::Range(a, b) => write!(f, "{a}..{b}")?,
                            ParamValue::Names(ns) => write!(f, "{}", ns.join(","))?,
                            ParamValue::Ints(v) => write_ints(f, v)?,
                            ParamValue::Matrices(ms) => {
                                write!(f, "[")?;
                                for (i, m) in ms.iter().enumerate() {
                                    if i > 0 {
                                        write!(f, ", ")?;
                                    }
                                    write_matrix(f, m)?;
                                }
                                write!(f, "]")?;
                            }
                        }
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# quadric complete intersection
field p = 5
ring A = [x, y] / (x^2, y^2)
module k = k A
module M = coker A [[x, y]] degrees [0]   # the residue field again
module T = kchi A j=1
module C = cut k j=2
module S = syzygy k i=2
module U = sum k M
task betti k maxdeg=6
task ext k T maxdeg=4
task verify-complex A matrices=[
    [[x]],
    [[x]]
] range=0..1
task testci k t=1 q=1 n=2 tests=M,T
";

    #[test]
    fn parses_and_round_trips() {
        let s = parse_scenario(SMALL).unwrap();
        assert_eq!(s.tasks().count(), 4);
        assert_eq!(s.field(), 5);
        let printed = s.to_string();
        let again = parse_scenario(&printed).unwrap();
        assert_eq!(s, again);
        assert_eq!(printed, again.to_string());
    }

    #[test]
    fn empty_input() {
        let e = parse_scenario("").unwrap_err();
        assert!(e.message.starts_with("expected 'field'"), "{e}");
        assert_eq!(e.loc, Loc { line: 1, col: 1 });
        let e = parse_scenario("  # nothing here\n\n").unwrap_err();
        assert!(e.message.starts_with("expected 'field'"));
    }

    fn error_at(text: &str) -> (usize, usize, String) {
        let e = parse_scenario(text).unwrap_err();
        (e.loc.line, e.loc.col, e.message)
    }

    #[test]
    fn semantic_errors_are_located() {
        let (l, c, m) = error_at("field p = 5\nring A = [x] / (x^2)\nmodule k = k A\nmodule k = k A\n");
        assert_eq!((l, c), (4, 8));
        assert!(m.contains("already defined at 3:8"));
        let (l, _, m) = error_at("field p = 6\n");
        assert_eq!(l, 1);
        assert!(m.contains("not a prime"));
        let (l, c, m) = error_at("field p = 5\nring A = [x] / (x^2 + x)\n");
        assert_eq!((l, c), (2, 1));
        assert!(m.contains("homogeneous"), "{m}");
        let (l, c, _) = error_at("field p = 5\nring A = [x] / (x^2)\ntask betti N maxdeg=3\n");
        assert_eq!((l, c), (3, 12));
        let (_, _, m) = error_at("field p = 5\nring A = [x] / (x^2)\nmodule k = k A\ntask betti k\n");
        assert!(m.contains("needs parameter 'maxdeg'"));
        let (_, _, m) = error_at("field p = 5\nring A = [x,y] / (x^2,y^2)\nmodule k = k A\ntask testci k t=1 q=2 n=2 tests=k\n");
        assert!(m.contains("odd"));
        let (_, _, m) = error_at("field p = 5\nring A = [x,y] / (x^2,x*y,y^2)\nmodule k = kchi A j=1\n");
        assert!(m.contains("monomial complete intersection"));
    }

    #[test]
    fn syntax_errors_are_located() {
        let (l, c, m) = error_at("field p = 5\nring A = [x] (x^2)\n");
        assert_eq!((l, c), (2, 14));
        assert!(m.contains("expected '/'"));
        let (l, _, m) = error_at("field p = 5\nring A = [x] / (x^2)\nmodule k = k A extra\n");
        assert_eq!(l, 3);
        assert!(m.contains("end of line"));
        let (_, _, m) = error_at("field p = 5\nring A = [x] / (x^2)\nmodule k = k A\ntask frobnicate k\n");
        assert!(m.contains("unknown task"));
        let (l, c, _) = error_at("field p = 5\nring A = [x] / (x^^2)\n");
        assert_eq!(l, 2);
        assert!(c >= 17);
    }
}
