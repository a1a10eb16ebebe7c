//! Recursive-descent parsers for programs, expressions, trace formulas and
//! contracts.

use super::ast::{ContractDecl, ProcDecl, Program, Stmt};
use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;
use crate::expr::{BinOp, Expr, Value};
use crate::logic::{EvPat, Formula, NameP, Term};
use crate::trace::FileOp;

const EVENT_KEYWORDS: [&str; 10] = ["start", "call", "invoc", "push", "pop", "ret", "open", "close", "read", "write"];

/// Token cursor.
pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, FrontendError>;

impl Parser {
    pub(crate) fn new(src: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: &str) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(FrontendError::syntax(t.line, t.col, &format!("{msg}, found {}", describe(&t.tok))))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("expected {what}"))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(&format!("expected {what}")),
        }
    }

    fn is_ident(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("expected end of input")
        }
    }

    fn position(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    // ---------------------------------------------------------------- programs

    /// `program := procdecl* '{' decls stmts '}'`.
    pub(crate) fn program(&mut self) -> PResult<Program> {
        let mut procedures = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let (line, col) = self.position();
            let name = self.ident("procedure name")?;
            self.expect(Tok::LParen, "'('")?;
            self.expect(Tok::RParen, "')'")?;
            self.expect(Tok::LBrace, "'{'")?;
            let stmts = self.stmts()?;
            self.expect(Tok::RBrace, "'}'")?;
            let body = match stmts.last() {
                Some(Stmt::Return) => Stmt::seq_all(stmts),
                _ => return Err(FrontendError::MissingReturn { procedure: name, line, col }),
            };
            procedures.push(ProcDecl { name, body });
        }
        self.expect(Tok::LBrace, "'{' opening the init block")?;
        let mut init_decls = Vec::new();
        // Declarations: bare identifiers followed by ';' (or the closing brace).
        while let Tok::Ident(x) = self.peek().clone() {
            let follows = self.peek_at(1).clone();
            let is_keyword = matches!(x.as_str(), "skip" | "return");
            if is_keyword || !matches!(follows, Tok::Semi | Tok::RBrace | Tok::Comma) {
                break;
            }
            self.bump();
            init_decls.push(x);
            if !self.eat(&Tok::Semi) {
                self.eat(&Tok::Comma);
            }
        }
        let mut stmts = if *self.peek() == Tok::RBrace { Vec::new() } else { self.stmts()? };
        self.expect(Tok::RBrace, "'}' closing the init block")?;
        self.expect_eof()?;
        if !matches!(stmts.last(), Some(Stmt::Return)) {
            stmts.push(Stmt::Return);
        }
        Ok(Program { procedures, init_decls, init_body: Stmt::seq_all(stmts) })
    }

    /// `stmts := stmt (';' stmt)* ';'?`; the separator is optional after a
    /// braced statement.
    fn stmts(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.stmt()?];
        loop {
            let braced = matches!(out.last(), Some(Stmt::If(..)));
            if self.eat(&Tok::Semi) {
                if *self.peek() == Tok::RBrace {
                    break;
                }
            } else if !(braced && *self.peek() != Tok::RBrace) {
                break;
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let (line, col) = self.position();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                let m = self.ident("procedure name after '!'")?;
                self.expect(Tok::LParen, "'('")?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Stmt::AsyncCall(m))
            }
            Tok::Ident(kw) => {
                self.bump();
                match kw.as_str() {
                    "skip" => Ok(Stmt::Skip),
                    "return" => Ok(Stmt::Return),
                    "if" => {
                        self.expect(Tok::LParen, "'(' after if")?;
                        let e = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        self.expect(Tok::LBrace, "'{'")?;
                        let body = self.stmts()?;
                        self.expect(Tok::RBrace, "'}'")?;
                        Ok(Stmt::If(e, Box::new(Stmt::seq_all(body))))
                    }
                    k if FileOp::from_keyword(k).is_some() && *self.peek() == Tok::LParen => {
                        let op = FileOp::from_keyword(k).expect("checked");
                        self.bump();
                        let (fl, fc) = self.position();
                        let arg = self.expr()?;
                        if !matches!(arg, Expr::Var(_) | Expr::Lit(Value::Str(_))) {
                            return Err(FrontendError::NonLiteralFile { line: fl, col: fc });
                        }
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Stmt::File(op, arg))
                    }
                    _ => match self.peek() {
                        Tok::Assign => {
                            self.bump();
                            Ok(Stmt::Assign(kw, self.expr()?))
                        }
                        Tok::LParen => {
                            self.bump();
                            self.expect(Tok::RParen, "')'")?;
                            Ok(Stmt::SyncCall(kw))
                        }
                        _ => Err(FrontendError::syntax(line, col, &format!("expected a statement, found {kw:?}"))),
                    },
                }
            }
            _ => self.error("expected a statement"),
        }
    }

    // ------------------------------------------------------------- expressions

    /// Precedence climbing over binary operators.
    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.expr_prec(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::AndAnd => BinOp::And,
            Tok::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    fn expr_prec(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min {
                break;
            }
            self.bump();
            let rhs = self.expr_prec(op.precedence() + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::Minus => {
                self.bump();
                Ok(match self.unary()? {
                    Expr::Lit(Value::Int(i)) => Expr::int(-i),
                    e => Expr::bin(BinOp::Sub, Expr::int(0), e),
                })
            }
            Tok::Int(i) => {
                self.bump();
                Ok(Expr::int(i))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Lit(Value::Str(s)))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(match x.as_str() {
                    "true" => Expr::bool(true),
                    "false" => Expr::bool(false),
                    _ => Expr::Var(x),
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => self.error("expected an expression"),
        }
    }

    // ---------------------------------------------------------------- formulas

    /// `formula := or`, with `\/` < `/\` < (`.`, `**`, juxtaposition).
    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Vee) {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.chain()?;
        while self.eat(&Tok::Wedge) {
            f = Formula::and(f, self.chain()?);
        }
        Ok(f)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::LBracket | Tok::Tilde | Tok::LParen | Tok::Ident(_))
    }

    fn chain(&mut self) -> PResult<Formula> {
        let mut f = self.atom()?;
        loop {
            if self.eat(&Tok::StarStar) {
                f = Formula::chop(f, self.atom()?);
            } else if self.eat(&Tok::Dot) {
                f = Formula::concat(f, self.atom()?);
            } else if self.starts_atom() {
                // Juxtaposition abbreviates chop.
                f = Formula::chop(f, self.atom()?);
            } else {
                return Ok(f);
            }
        }
    }

    fn is_event_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(k) if EVENT_KEYWORDS.contains(&k.as_str())) && *self.peek_at(1) == Tok::LParen
    }

    fn atom(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::LBracket => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RBracket, "']' closing a predicate")?;
                Ok(Formula::Pred(e))
            }
            Tok::Tilde => {
                self.bump();
                let exclusion_list = *self.peek() == Tok::LBracket
                    && (*self.peek_at(1) == Tok::RBracket
                        || (matches!(self.peek_at(1), Tok::Ident(k) if EVENT_KEYWORDS.contains(&k.as_str()))
                            && *self.peek_at(2) == Tok::LParen));
                if !exclusion_list {
                    return Ok(Formula::top());
                }
                self.bump();
                let mut pats = Vec::new();
                if *self.peek() != Tok::RBracket {
                    loop {
                        pats.push(self.event_pattern()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket, "']' closing an exclusion list")?;
                Ok(Formula::NoEv(pats))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            Tok::Ident(k) if k == "mu" => {
                self.bump();
                let x = self.ident("recursion variable")?;
                self.expect(Tok::Dot, "'.' after the recursion variable")?;
                Ok(Formula::mu(&x, self.formula()?))
            }
            Tok::Ident(k) if k == "obs" => {
                self.bump();
                let x = self.ident("program variable")?;
                if !self.is_ident("as") {
                    return self.error("expected 'as'");
                }
                self.bump();
                let y = self.ident("logic variable")?;
                self.expect(Tok::Dot, "'.' after the observation binder")?;
                Ok(Formula::obs(&x, &y, self.formula()?))
            }
            Tok::Ident(_) if self.is_event_start() => Ok(Formula::Ev(self.event_pattern()?)),
            Tok::Ident(x) => {
                self.bump();
                Ok(Formula::Var(x))
            }
            _ => self.error("expected a trace formula"),
        }
    }

    fn name_pos(&mut self) -> PResult<NameP> {
        if self.eat(&Tok::Underscore) {
            Ok(NameP::Any)
        } else {
            Ok(NameP::Is(self.ident("procedure name")?))
        }
    }

    fn term(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Underscore) {
            Ok(Term::Any)
        } else {
            Ok(Term::Is(self.expr()?))
        }
    }

    fn event_pattern(&mut self) -> PResult<EvPat> {
        let kw = self.ident("event")?;
        self.expect(Tok::LParen, "'('")?;
        let scoped = |p: &mut Parser| -> PResult<(NameP, Term)> {
            let n = p.name_pos()?;
            p.expect(Tok::Comma, "','")?;
            Ok((n, p.term()?))
        };
        let pat = match kw.as_str() {
            "start" => {
                let (n, t) = scoped(self)?;
                EvPat::Start(n, t)
            }
            "call" => {
                let (n, t) = scoped(self)?;
                EvPat::Call(n, t)
            }
            "invoc" => {
                let (n, t) = scoped(self)?;
                EvPat::Invoc(n, t)
            }
            "push" => {
                let (n, t) = scoped(self)?;
                EvPat::Push(n, t)
            }
            "pop" => {
                let (n, t) = scoped(self)?;
                EvPat::Pop(n, t)
            }
            "ret" => EvPat::Ret(self.term()?),
            k => match FileOp::from_keyword(k) {
                Some(op) => EvPat::File(op, self.term()?),
                None => return self.error("expected an event"),
            },
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(pat)
    }

    // --------------------------------------------------------------- contracts

    /// `contract NAME { clause; ... }`.
    pub(crate) fn contract(&mut self) -> PResult<ContractDecl> {
        if !self.is_ident("contract") {
            return self.error("expected 'contract'");
        }
        self.bump();
        let name = self.ident("procedure name")?;
        self.expect(Tok::LBrace, "'{'")?;
        let mut c = ContractDecl::trivial(&name);
        let mut seen: Vec<String> = Vec::new();
        while *self.peek() != Tok::RBrace {
            let (line, col) = self.position();
            let clause = self.ident("a clause (assume, pre, internal, post, continue)")?;
            if seen.contains(&clause) {
                return Err(FrontendError::syntax(line, col, &format!("duplicate clause {clause}")));
            }
            self.expect(Tok::Colon, "':'")?;
            match clause.as_str() {
                "assume" => c.assume = self.formula()?,
                "internal" => c.internal = self.formula()?,
                "continue" => c.cont = self.formula()?,
                "pre" => (c.pre, c.pre_binders) = self.boundary()?,
                "post" => (c.post, c.post_binders) = self.boundary()?,
                other => return Err(FrontendError::syntax(line, col, &format!("unknown clause {other}"))),
            }
            seen.push(clause);
            self.expect(Tok::Semi, "';' after a clause")?;
        }
        self.expect(Tok::RBrace, "'}'")?;
        Ok(c)
    }

    /// `pred obs(x as y, ...)?`, the predicate optionally bracketed.
    fn boundary(&mut self) -> PResult<(Expr, Vec<(String, String)>)> {
        let pred = if self.eat(&Tok::LBracket) {
            let e = self.expr()?;
            self.expect(Tok::RBracket, "']'")?;
            e
        } else {
            self.expr()?
        };
        let mut binders = Vec::new();
        if self.is_ident("obs") {
            self.bump();
            self.expect(Tok::LParen, "'('")?;
            loop {
                let x = self.ident("program variable")?;
                if !self.is_ident("as") {
                    return self.error("expected 'as'");
                }
                self.bump();
                binders.push((x, self.ident("logic variable")?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "')'")?;
        }
        Ok((pred, binders))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Int(i) => format!("integer {i}"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}
