//! Lexer and recursive-descent parser.

use crate::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    start: Span,
    /// Position just past the token.
    end: Span,
}

const PUNCT: [&str; 17] = ["/\\", ";", ",", ":", "=", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", "."];

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let here = |line, col| Span { line, col };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = here(line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += (i - s) as u32;
            out.push(Token { tok: Tok::Ident(chars[s..i].iter().collect()), start, end: here(line, col) });
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += (i - s) as u32;
            out.push(Token { tok: Tok::Int(chars[s..i].iter().collect()), start, end: here(line, col) });
            continue;
        }
        if c == '"' {
            let s = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(ParseError { span: start, message: "unterminated string".into() });
            }
            let text: String = chars[s..i].iter().collect();
            i += 1;
            col += (i - s + 1) as u32;
            out.push(Token { tok: Tok::Str(text), start, end: here(line, col) });
            continue;
        }
        let mut hit = None;
        for p in PUNCT {
            let pc: Vec<char> = p.chars().collect();
            if chars[i..].starts_with(&pc) {
                hit = Some(p);
                break;
            }
        }
        match hit {
            Some(p) => {
                i += p.len();
                col += p.len() as u32;
                out.push(Token { tok: Tok::Punct(p), start, end: here(line, col) });
            }
            None => return Err(ParseError { span: start, message: format!("unexpected character '{}'", c) }),
        }
    }
    let end = here(line, col);
    out.push(Token { tok: Tok::Eof, start: end, end });
    Ok(out)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{}'", s),
        Tok::Int(s) => format!("'{}'", s),
        Tok::Str(s) => format!("\"{}\"", s),
        Tok::Punct(p) => format!("'{}'", p),
        Tok::Eof => "end of input".into(),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].start
    }

    /// Errors point just past the last consumed token, so `u[x z]`
    /// reports the blank after `x`.
    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let span = if self.pos == 0 { self.toks[0].start } else { self.toks[self.pos - 1].end };
        let mut exp: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        exp.sort();
        exp.dedup();
        Err(ParseError { span, message: format!("expected {}, found {}", exp.join(" or "), describe(self.peek())) })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &'static str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.fail(&[&format!("'{}'", p)])
        }
    }

    fn keyword(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("'{}'", k)])
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                s.parse().map_err(|_| ParseError { span: self.span(), message: format!("integer {} out of range", s) })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn int32(&mut self) -> PResult<u32> {
        let v = self.int()?;
        u32::try_from(v).map_err(|_| ParseError { span: self.span(), message: format!("integer {} out of range", v) })
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut v = vec![self.ident()?];
        while self.eat(",") {
            v.push(self.ident()?);
        }
        Ok(v)
    }

    /// A hyphenated keyword such as `verify-covering`, written without blanks.
    fn compound(&mut self) -> PResult<String> {
        let mut s = self.ident()?;
        while self.is("-") && self.toks[self.pos].start == self.toks[self.pos - 1].end {
            if let Tok::Ident(next) = self.peek_at(1).clone() {
                if self.toks[self.pos + 1].start == self.toks[self.pos].end {
                    self.bump();
                    self.bump();
                    s.push('-');
                    s.push_str(&next);
                    continue;
                }
            }
            break;
        }
        Ok(s)
    }

    // expressions: sum := term (('+'|'-') term)*; term := unary (('*'|'/'|'/\') unary)*;
    // unary := '-' unary | power; power := atom ('^' ['-'] int)?
    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.term()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            let r = self.term()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/\\") {
                BinOp::Wedge
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(e);
            };
            let r = self.unary()?;
            e = Expr::Bin(op, Box::new(e), Box::new(r));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let a = self.atom()?;
        if self.eat("^") {
            let neg = self.eat("-");
            let k = self.int()?;
            let k = i64::try_from(k).map_err(|_| ParseError { span: self.span(), message: "exponent out of range".into() })?;
            return Ok(Expr::Pow(Box::new(a), if neg { -k } else { k }));
        }
        Ok(a)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                Ok(Expr::Int(s))
            }
            Tok::Ident(s) => {
                self.bump();
                if self.eat("[") {
                    let mut idx = Vec::new();
                    loop {
                        match self.peek().clone() {
                            Tok::Ident(x) | Tok::Int(x) => {
                                self.bump();
                                idx.push(x);
                            }
                            _ => return self.fail(&["index"]),
                        }
                        if self.eat(",") {
                            continue;
                        }
                        if self.eat("]") {
                            break;
                        }
                        return self.fail(&["','", "']'"]);
                    }
                    return Ok(Expr::Jet(s, idx));
                }
                if self.is("(") && self.toks[self.pos].start == self.toks[self.pos - 1].end {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.eat(",") {
                        args.push(self.expr()?);
                    }
                    self.expect(")")?;
                    return Ok(Expr::Call(s, args));
                }
                Ok(Expr::Name(s))
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.fail(&["expression"]),
        }
    }

    fn form_ref(&mut self) -> PResult<FormRef> {
        let coframe = self.ident()?;
        self.expect(".")?;
        let form = self.ident()?;
        Ok(FormRef { coframe, form })
    }

    fn we_end(&mut self) -> PResult<WeEnd> {
        if matches!(self.peek_at(1), Tok::Punct(".")) {
            Ok(WeEnd::Form(self.form_ref()?))
        } else {
            Ok(WeEnd::Covering(self.ident()?))
        }
    }

    fn rule_list(&mut self, out: &mut Vec<(String, Expr)>) -> PResult<()> {
        self.keyword("d")?;
        let n = self.ident()?;
        self.expect("=")?;
        let e = self.expr()?;
        self.expect(";")?;
        out.push((n, e));
        Ok(())
    }

    fn task(&mut self) -> PResult<(TaskKind, bool)> {
        let kw_span = self.span();
        let kw = self.compound()?;
        let kind = match kw.as_str() {
            "verify-covering" => {
                let covering = self.ident()?;
                let depth = if self.is_kw("depth") {
                    self.bump();
                    Some(self.int32()?)
                } else {
                    None
                };
                TaskKind::VerifyCovering { covering, depth }
            }
            "verify-structure" => {
                let coframe = self.ident()?;
                self.keyword("against")?;
                TaskKind::VerifyStructure { coframe, structure: self.ident()? }
            }
            "verify-d2" => TaskKind::VerifyD2 { structure: self.ident()? },
            "cartan" => {
                let structure = self.ident()?;
                self.keyword("base")?;
                let base = self.ident_list()?;
                let expect = if self.is_kw("expect") && matches!(self.peek_at(1), Tok::Ident(s) if s == "s") {
                    self.bump();
                    self.bump();
                    let mut s = vec![self.int32()?];
                    while self.eat(",") {
                        s.push(self.int32()?);
                    }
                    self.keyword("r2")?;
                    Some((s, self.int32()?))
                } else {
                    None
                };
                TaskKind::Cartan { structure, base, expect }
            }
            "we-convert" => {
                let from = self.we_end()?;
                self.keyword("to")?;
                TaskKind::WeConvert { from, to: self.we_end()? }
            }
            "cie-verify" => {
                let candidate = self.ident()?;
                let mut assume = Vec::new();
                if self.is_kw("assume") {
                    self.bump();
                    loop {
                        let n = self.ident()?;
                        self.expect("=")?;
                        assume.push((n, self.expr()?));
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                TaskKind::CieVerify { candidate, assume }
            }
            "cie-search" => {
                let structure = self.ident()?;
                let mut zero = Vec::new();
                let mut nodes = None;
                if self.is_kw("zero") {
                    self.bump();
                    zero = self.ident_list()?;
                }
                if self.is_kw("nodes") {
                    self.bump();
                    nodes = Some(self.int()?);
                }
                TaskKind::CieSearch { structure, zero, nodes }
            }
            "lift-check" => {
                let covering = self.ident()?;
                self.keyword("by")?;
                let generator = self.ident()?;
                self.keyword("order")?;
                let order = self.int32()?;
                let flow = if self.is_kw("flow") {
                    self.bump();
                    let c0 = self.ident()?;
                    self.keyword("time")?;
                    Some((c0, self.expr()?))
                } else {
                    None
                };
                TaskKind::LiftCheck { covering, generator, order, flow }
            }
            "realize" => {
                let candidate = self.ident()?;
                self.keyword("with")?;
                let omega = self.form_ref()?;
                let mut independent = Vec::new();
                if self.is_kw("independent") {
                    self.bump();
                    independent = self.ident_list()?;
                }
                TaskKind::Realize { candidate, omega, independent }
            }
            other => {
                return Err(ParseError { span: kw_span, message: format!("unknown task kind '{}'", other) });
            }
        };
        let expect_fail = if self.is_kw("expect") {
            self.bump();
            self.keyword("fail")?;
            true
        } else {
            false
        };
        Ok((kind, expect_fail))
    }

    fn decl(&mut self) -> PResult<Decl> {
        let kw = self.ident()?;
        match kw.as_str() {
            "import" => match self.bump() {
                Tok::Str(s) => {
                    self.expect(";")?;
                    Ok(Decl::Import(s))
                }
                _ => {
                    self.pos -= 1;
                    self.fail(&["string"])
                }
            },
            "chart" => {
                let name = self.ident()?;
                self.expect("{")?;
                let (mut base, mut dependent, mut order, mut params) = (None, None, None, Vec::new());
                while !self.eat("}") {
                    let k = self.ident()?;
                    match k.as_str() {
                        "base" => base = Some(self.ident_list()?),
                        "dependent" => dependent = Some(self.ident()?),
                        "order" => order = Some(self.int32()?),
                        "params" => params = self.ident_list()?,
                        _ => {
                            self.pos -= 1;
                            return self.fail(&["'base'", "'dependent'", "'order'", "'params'", "'}'"]);
                        }
                    }
                    self.expect(";")?;
                }
                let missing = |w: &str| ParseError { span: self.span(), message: format!("chart {} lacks '{}'", name, w) };
                Ok(Decl::Chart {
                    name: name.clone(),
                    base: base.ok_or_else(|| missing("base"))?,
                    dependent: dependent.ok_or_else(|| missing("dependent"))?,
                    order: order.ok_or_else(|| missing("order"))?,
                    params,
                })
            }
            "relation" => {
                let name = self.ident()?;
                self.expect(":")?;
                let lhs = self.expr()?;
                self.expect("=")?;
                let rhs = self.expr()?;
                self.expect(";")?;
                Ok(Decl::Relation { name, lhs, rhs })
            }
            "covering" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let relation = self.ident()?;
                self.expect("{")?;
                self.keyword("fibre")?;
                let fibre = self.ident()?;
                self.keyword("along")?;
                let a = self.ident()?;
                self.expect(",")?;
                let b = self.ident()?;
                self.expect(";")?;
                let mut params = Vec::new();
                if self.is_kw("params") {
                    self.bump();
                    params = self.ident_list()?;
                    self.expect(";")?;
                }
                let mut rules = Vec::new();
                while !self.eat("}") {
                    self.keyword("rule")?;
                    let dir = self.ident()?;
                    self.expect("=")?;
                    let e = self.expr()?;
                    self.expect(";")?;
                    rules.push((dir, e));
                }
                Ok(Decl::Covering { name, relation, fibre, along: (a, b), params, rules })
            }
            "generator" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let relation = self.ident()?;
                self.expect("{")?;
                let mut components = Vec::new();
                while !self.eat("}") {
                    let dir = self.ident()?;
                    self.expect("=")?;
                    let e = self.expr()?;
                    self.expect(";")?;
                    components.push((dir, e));
                }
                Ok(Decl::Generator { name, relation, components })
            }
            "coframe" => {
                let name = self.ident()?;
                self.keyword("on")?;
                let relation = self.ident()?;
                self.expect("{")?;
                self.keyword("jet_order")?;
                let jet_order = self.int32()?;
                self.expect(";")?;
                let mut fibre = None;
                if self.is_kw("fibre") {
                    self.bump();
                    let n = self.ident()?;
                    self.keyword("along")?;
                    let a = self.ident()?;
                    self.expect(",")?;
                    let b = self.ident()?;
                    self.keyword("order")?;
                    let order = self.int32()?;
                    self.expect(";")?;
                    fibre = Some(FibreDecl { name: n, along: (a, b), order });
                }
                let mut coordinates = Vec::new();
                if self.is_kw("coordinates") {
                    self.bump();
                    coordinates = self.ident_list()?;
                    self.expect(";")?;
                }
                let mut items = Vec::new();
                while !self.eat("}") {
                    let k = self.ident()?;
                    match k.as_str() {
                        "let" | "form" => {
                            let n = self.ident()?;
                            self.expect("=")?;
                            let e = self.expr()?;
                            items.push(if k == "let" { CoframeItem::Let(n, e) } else { CoframeItem::Form(n, e) });
                        }
                        "identity" => {
                            let n = self.ident()?;
                            self.expect(":")?;
                            let l = self.expr()?;
                            self.expect("=")?;
                            let r = self.expr()?;
                            items.push(CoframeItem::Identity(n, l, r));
                        }
                        _ => {
                            self.pos -= 1;
                            return self.fail(&["'let'", "'form'", "'identity'", "'}'"]);
                        }
                    }
                    self.expect(";")?;
                }
                Ok(Decl::Coframe { name, relation, jet_order, fibre, coordinates, items })
            }
            "structure" => {
                let name = self.ident()?;
                self.expect("{")?;
                self.keyword("forms")?;
                let forms = self.ident_list()?;
                self.expect(";")?;
                let mut free = Vec::new();
                if self.is_kw("free") {
                    self.bump();
                    free = self.ident_list()?;
                    self.expect(";")?;
                }
                let mut rules = Vec::new();
                while !self.eat("}") {
                    self.rule_list(&mut rules)?;
                }
                Ok(Decl::Structure { name, forms, free, rules })
            }
            "candidate" => {
                let name = self.ident()?;
                self.keyword("extends")?;
                let base = self.ident()?;
                self.expect("{")?;
                self.keyword("forms")?;
                let forms = self.ident_list()?;
                self.expect(";")?;
                let mut invariants = Vec::new();
                let mut params = Vec::new();
                if self.is_kw("invariants") {
                    self.bump();
                    invariants = self.ident_list()?;
                    self.expect(";")?;
                }
                if self.is_kw("params") {
                    self.bump();
                    params = self.ident_list()?;
                    self.expect(";")?;
                }
                let mut rules = Vec::new();
                while !self.eat("}") {
                    self.rule_list(&mut rules)?;
                }
                Ok(Decl::Candidate { name, base, forms, invariants, params, rules })
            }
            "task" => {
                let name = self.ident()?;
                self.expect(":")?;
                let (kind, expect_fail) = self.task()?;
                self.expect(";")?;
                Ok(Decl::Task { name, kind, expect_fail })
            }
            "suite" => {
                let name = self.ident()?;
                self.expect("{")?;
                let mut tasks = Vec::new();
                if !self.eat("}") {
                    tasks = self.ident_list()?;
                    self.eat(";");
                    self.expect("}")?;
                }
                Ok(Decl::Suite { name, tasks })
            }
            _ => {
                self.pos -= 1;
                self.fail(&["declaration"])
            }
        }
    }
}

/// Parses a document. An empty input gives an empty document; otherwise
/// the first statement must be `version 1;`.
pub fn parse(src: &str) -> Result<Document, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut doc = Document { version: 1, items: Vec::new() };
    if *p.peek() == Tok::Eof {
        return Ok(doc);
    }
    p.keyword("version")?;
    let v = p.int32()?;
    if v != 1 {
        return Err(ParseError { span: p.toks[p.pos - 1].start, message: format!("unsupported version {}", v) });
    }
    p.expect(";")?;
    doc.version = v;
    while *p.peek() != Tok::Eof {
        let span = p.span();
        let decl = p.decl()?;
        if let Some(n) = decl.name() {
            if doc.items.iter().any(|it| it.decl.name() == Some(n)) {
                return Err(ParseError { span, message: format!("duplicate name '{}'", n) });
            }
        }
        doc.items.push(Item { span, decl });
    }
    Ok(doc)
}

/// Parses a single expression (used by tests and the printer's checks).
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    Ok(e)
}
