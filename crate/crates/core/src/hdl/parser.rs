// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser for the supported Verilog subset.

use std::collections::BTreeMap;

use crate::bitvec::RawLiteral;
use crate::expr::{Cursor, Expr, ExprError};
use crate::hdl::ast::{
    CaseArm, ContAssign, Edge, HdlModule, ModuleInstance, Process, ProcessKind, Stmt,
};
use crate::lexer::{is_keyword, tokenize, Pos, TokenKind};
use crate::model::{Direction, PortMap};

/// Constructs recognized by name and rejected with their position.
const UNSUPPORTED: &[&str] = &[
    "for",
    "while",
    "repeat",
    "forever",
    "generate",
    "endgenerate",
    "genvar",
    "function",
    "task",
    "initial",
    "integer",
    "inout",
    "casex",
    "casez",
    "always_latch",
    "fork",
    "wait",
    "disable",
    "specify",
    "primitive",
    "interface",
    "package",
    "class",
    "typedef",
    "struct",
    "enum",
];

/// Parses every module in `text`.
pub fn parse_hdl_modules(text: &str) -> Result<Vec<HdlModule>, ExprError> {
    let mut p = Parser {
        cur: Cursor::new(tokenize(text)?),
        params: BTreeMap::new(),
    };
    let mut modules = Vec::new();
    while !p.cur.at_eof() {
        p.reject_unsupported()?;
        p.params.clear();
        modules.push(p.module()?);
    }
    if modules.is_empty() {
        return Err(p.cur.syntax("no module found"));
    }
    Ok(modules)
}

/// Parses the first module in `text`.
pub fn parse_hdl(text: &str) -> Result<HdlModule, ExprError> {
    Ok(parse_hdl_modules(text)?.remove(0))
}

struct Parser {
    cur: Cursor,
    params: BTreeMap<String, RawLiteral>,
}

#[derive(Default)]
struct ModuleBuilder {
    ports: Vec<(String, Option<Direction>, u32, Pos)>,
    signals: BTreeMap<String, u32>,
    processes: Vec<Process>,
    assigns: Vec<ContAssign>,
    instances: Vec<ModuleInstance>,
}

impl ModuleBuilder {
    fn declare_port(&mut self, name: &str, dir: Direction, width: u32, pos: Pos) {
        match self.ports.iter_mut().find(|p| p.0 == name) {
            Some(p) => {
                p.1 = Some(dir);
                p.2 = width;
            }
            None => self.ports.push((name.to_string(), Some(dir), width, pos)),
        }
    }
}

impl Parser {
    fn unsupported(&self, construct: &str) -> ExprError {
        ExprError::Unsupported {
            pos: self.cur.pos(),
            construct: construct.to_string(),
        }
    }

    fn reject_unsupported(&self) -> Result<(), ExprError> {
        if let TokenKind::Ident(w) = &self.cur.peek().kind {
            if UNSUPPORTED.contains(&w.as_str()) {
                return Err(self.unsupported(w));
            }
        }
        Ok(())
    }

    fn ident(&mut self) -> Result<(String, Pos), ExprError> {
        self.reject_unsupported()?;
        let pos = self.cur.pos();
        let (name, pos2) = self.cur.expect_ident()?;
        if is_keyword(&name) {
            return Err(ExprError::Syntax {
                pos,
                message: format!("expected identifier, found keyword `{name}`"),
            });
        }
        Ok((name, pos2))
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let e = self.cur.expr()?;
        let params = &self.params;
        Ok(e.map_idents(&mut |n| match params.get(n) {
            Some(l) => Expr::Literal(*l),
            None => Expr::ident(n),
        }))
    }

    fn const_int(&mut self) -> Result<i64, ExprError> {
        let base = match self.cur.peek().kind.clone() {
            TokenKind::Number(_) => self.cur.expect_number()?.0.value as i64,
            TokenKind::Ident(n) => {
                let v = self
                    .params
                    .get(&n)
                    .ok_or_else(|| self.cur.syntax(format!("`{n}` is not a constant")))?
                    .value as i64;
                self.cur.next();
                v
            }
            other => {
                return Err(self
                    .cur
                    .syntax(format!("expected constant, found `{other}`")))
            }
        };
        if self.cur.eat_sym("-") {
            Ok(base - self.cur.expect_number()?.0.value as i64)
        } else if self.cur.eat_sym("+") {
            Ok(base + self.cur.expect_number()?.0.value as i64)
        } else {
            Ok(base)
        }
    }

    /// Optional `[msb:lsb]`; returns the width.
    fn range(&mut self) -> Result<u32, ExprError> {
        if !self.cur.is_sym("[") {
            return Ok(1);
        }
        let pos = self.cur.pos();
        self.cur.next();
        let msb = self.const_int()?;
        self.cur.expect_sym(":")?;
        let lsb = self.const_int()?;
        self.cur.expect_sym("]")?;
        let width = (msb - lsb).abs() + 1;
        if !(1..=64).contains(&width) {
            return Err(ExprError::Syntax {
                pos,
                message: format!("range width {width} is outside 1..=64"),
            });
        }
        Ok(width as u32)
    }

    fn net_kind(&mut self) {
        for w in ["wire", "reg", "logic"] {
            if self.cur.eat_word(w) {
                break;
            }
        }
        if self.cur.is_word("signed") {
            self.cur.next();
        }
    }

    fn module(&mut self) -> Result<HdlModule, ExprError> {
        let pos = self.cur.pos();
        self.cur.expect_word("module")?;
        let (name, _) = self.ident()?;
        let mut b = ModuleBuilder::default();
        if self.cur.eat_sym("#") {
            self.cur.expect_sym("(")?;
            loop {
                self.cur.eat_word("parameter");
                self.param_assignment()?;
                if !self.cur.eat_sym(",") {
                    break;
                }
            }
            self.cur.expect_sym(")")?;
        }
        if self.cur.eat_sym("(") {
            if !self.cur.is_sym(")") {
                self.port_list(&mut b)?;
            }
            self.cur.expect_sym(")")?;
        }
        self.cur.expect_sym(";")?;
        while !self.cur.eat_word("endmodule") {
            if self.cur.at_eof() {
                return Err(self.cur.syntax("missing `endmodule`"));
            }
            self.item(&mut b)?;
        }
        let mut ports = PortMap::default();
        for (pname, dir, width, ppos) in b.ports {
            let dir = dir.ok_or(ExprError::Syntax {
                pos: ppos,
                message: format!("port `{pname}` has no direction"),
            })?;
            ports.push(dir, &pname, width);
        }
        for p in &ports.entries {
            b.signals.remove(&p.name);
        }
        Ok(HdlModule {
            name,
            ports,
            signals: b.signals,
            params: self.params.clone(),
            processes: b.processes,
            assigns: b.assigns,
            instances: b.instances,
            pos,
        })
    }

    fn port_list(&mut self, b: &mut ModuleBuilder) -> Result<(), ExprError> {
        let mut dir: Option<Direction> = None;
        let mut width = 1;
        loop {
            self.reject_unsupported()?;
            if self.cur.eat_word("input") {
                dir = Some(Direction::Input);
                self.net_kind();
                width = self.range()?;
            } else if self.cur.eat_word("output") {
                dir = Some(Direction::Output);
                self.net_kind();
                width = self.range()?;
            }
            let (pname, pos) = self.ident()?;
            match dir {
                Some(d) => b.declare_port(&pname, d, width, pos),
                None => b.ports.push((pname, None, 1, pos)),
            }
            if !self.cur.eat_sym(",") {
                return Ok(());
            }
        }
    }

    fn param_assignment(&mut self) -> Result<(), ExprError> {
        self.range()?;
        let (pname, _) = self.ident()?;
        self.cur.expect_sym("=")?;
        let (lit, _) = self.cur.expect_number()?;
        self.params.insert(pname, lit);
        Ok(())
    }

    fn item(&mut self, b: &mut ModuleBuilder) -> Result<(), ExprError> {
        self.reject_unsupported()?;
        let pos = self.cur.pos();
        let word = match &self.cur.peek().kind {
            TokenKind::Ident(w) => w.clone(),
            TokenKind::Sym(";") => {
                self.cur.next();
                return Ok(());
            }
            other => {
                return Err(self
                    .cur
                    .syntax(format!("unexpected `{other}` in module body")))
            }
        };
        match word.as_str() {
            "input" | "output" => {
                self.cur.next();
                let dir = if word == "input" {
                    Direction::Input
                } else {
                    Direction::Output
                };
                self.net_kind();
                let width = self.range()?;
                loop {
                    let (n, p) = self.ident()?;
                    b.declare_port(&n, dir, width, p);
                    if !self.cur.eat_sym(",") {
                        break;
                    }
                }
                self.cur.expect_sym(";")
            }
            "wire" | "reg" | "logic" => {
                self.net_kind();
                let width = self.range()?;
                loop {
                    let (n, p) = self.ident()?;
                    if b.ports.iter().all(|q| q.0 != n) {
                        b.signals.insert(n.clone(), width);
                    }
                    if self.cur.eat_sym("=") {
                        let rhs = self.expr()?;
                        b.assigns.push(ContAssign {
                            lhs: n,
                            rhs,
                            pos: p,
                        });
                    }
                    if !self.cur.eat_sym(",") {
                        break;
                    }
                }
                self.cur.expect_sym(";")
            }
            "localparam" | "parameter" => {
                self.cur.next();
                loop {
                    self.param_assignment()?;
                    if !self.cur.eat_sym(",") {
                        break;
                    }
                }
                self.cur.expect_sym(";")
            }
            "assign" => {
                self.cur.next();
                loop {
                    let (lhs, p) = self.ident()?;
                    if self.cur.is_sym("[") {
                        return Err(self.unsupported("bit select"));
                    }
                    self.cur.expect_sym("=")?;
                    let rhs = self.expr()?;
                    b.assigns.push(ContAssign { lhs, rhs, pos: p });
                    if !self.cur.eat_sym(",") {
                        break;
                    }
                }
                self.cur.expect_sym(";")
            }
            "always" | "always_comb" | "always_ff" => {
                self.cur.next();
                let kind = if word == "always_comb" {
                    ProcessKind::Combinational
                } else {
                    self.sensitivity()?
                };
                let body = self.stmt()?;
                b.processes.push(Process { kind, body, pos });
                Ok(())
            }
            _ if is_keyword(&word) => Err(self.unsupported(&word)),
            _ => self.instance(b),
        }
    }

    fn sensitivity(&mut self) -> Result<ProcessKind, ExprError> {
        self.cur.expect_sym("@")?;
        if self.cur.eat_sym("*") {
            return Ok(ProcessKind::Combinational);
        }
        self.cur.expect_sym("(")?;
        if self.cur.eat_sym("*") {
            self.cur.expect_sym(")")?;
            return Ok(ProcessKind::Combinational);
        }
        let mut edges = Vec::new();
        let mut plain = false;
        loop {
            let rising = if self.cur.eat_word("posedge") {
                Some(true)
            } else if self.cur.eat_word("negedge") {
                Some(false)
            } else {
                None
            };
            let (signal, _) = self.ident()?;
            match rising {
                Some(r) => edges.push(Edge { rising: r, signal }),
                None => plain = true,
            }
            if !(self.cur.eat_sym(",") || self.cur.eat_word("or")) {
                break;
            }
        }
        self.cur.expect_sym(")")?;
        match (edges.is_empty(), plain) {
            (true, _) => Ok(ProcessKind::Combinational),
            (false, false) => Ok(ProcessKind::Clocked { edges }),
            (false, true) => Err(self.unsupported("mixed edge and level sensitivity")),
        }
    }

    fn instance(&mut self, b: &mut ModuleBuilder) -> Result<(), ExprError> {
        let pos = self.cur.pos();
        let (unit, _) = self.ident()?;
        if self.cur.eat_sym("#") {
            self.cur.expect_sym("(")?;
            let mut depth = 1;
            while depth > 0 {
                if self.cur.at_eof() {
                    return Err(self.cur.syntax("unterminated parameter override"));
                }
                if self.cur.is_sym("(") {
                    depth += 1;
                } else if self.cur.is_sym(")") {
                    depth -= 1;
                }
                self.cur.next();
            }
        }
        let (name, _) = self.ident()?;
        self.cur.expect_sym("(")?;
        let mut bindings = Vec::new();
        if !self.cur.is_sym(")") {
            loop {
                if !self.cur.eat_sym(".") {
                    return Err(self.unsupported("positional port connection"));
                }
                let (port, _) = self.ident()?;
                self.cur.expect_sym("(")?;
                let e = self.expr()?;
                self.cur.expect_sym(")")?;
                bindings.push((port, e));
                if !self.cur.eat_sym(",") {
                    break;
                }
            }
        }
        self.cur.expect_sym(")")?;
        self.cur.expect_sym(";")?;
        b.instances.push(ModuleInstance {
            unit,
            name,
            bindings,
            pos,
        });
        Ok(())
    }

    fn stmt(&mut self) -> Result<Stmt, ExprError> {
        self.reject_unsupported()?;
        let pos = self.cur.pos();
        if self.cur.eat_sym(";") {
            return Ok(Stmt::Empty);
        }
        if self.cur.eat_word("begin") {
            if self.cur.eat_sym(":") {
                self.ident()?;
            }
            let mut items = Vec::new();
            while !self.cur.eat_word("end") {
                if self.cur.at_eof() {
                    return Err(self.cur.syntax("missing `end`"));
                }
                items.push(self.stmt()?);
            }
            return Ok(Stmt::Block(items));
        }
        if self.cur.eat_word("if") {
            self.cur.expect_sym("(")?;
            let cond = self.expr()?;
            self.cur.expect_sym(")")?;
            let then = Box::new(self.stmt()?);
            let els = if self.cur.eat_word("else") {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                els,
                pos,
            });
        }
        if self.cur.eat_word("case") {
            return self.case(pos);
        }
        if let TokenKind::Ident(w) = &self.cur.peek().kind {
            if is_keyword(w) {
                return Err(self.unsupported(&w.clone()));
            }
        }
        let (lhs, _) = self.ident()?;
        if self.cur.is_sym("[") {
            return Err(self.unsupported("bit select"));
        }
        let blocking = if self.cur.eat_sym("=") {
            true
        } else if self.cur.eat_sym("<=") {
            false
        } else {
            return Err(self.cur.syntax(format!(
                "expected `=` or `<=`, found `{}`",
                self.cur.peek().kind
            )));
        };
        let rhs = self.expr()?;
        self.cur.expect_sym(";")?;
        Ok(Stmt::Assign {
            lhs,
            rhs,
            blocking,
            pos,
        })
    }

    fn case(&mut self, pos: Pos) -> Result<Stmt, ExprError> {
        self.cur.expect_sym("(")?;
        let subject = self.expr()?;
        self.cur.expect_sym(")")?;
        let mut arms = Vec::new();
        let mut default = None;
        while !self.cur.eat_word("endcase") {
            if self.cur.at_eof() {
                return Err(self.cur.syntax("missing `endcase`"));
            }
            let arm_pos = self.cur.pos();
            if self.cur.eat_word("default") {
                self.cur.eat_sym(":");
                if default.is_some() {
                    return Err(ExprError::Syntax {
                        pos: arm_pos,
                        message: "second default arm".into(),
                    });
                }
                default = Some(Box::new(self.stmt()?));
                continue;
            }
            let mut labels = vec![self.expr()?];
            while self.cur.eat_sym(",") {
                labels.push(self.expr()?);
            }
            self.cur.expect_sym(":")?;
            let body = self.stmt()?;
            arms.push(CaseArm {
                labels,
                body,
                pos: arm_pos,
            });
        }
        Ok(Stmt::Case {
            subject,
            arms,
            default,
            pos,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::codegen::{gen_unit, Style};

    #[test]
    fn generated_table1_parses() {
        let text = gen_unit(&bundled::table1(), Style::IfChain).unwrap();
        let m = parse_hdl(&text).unwrap();
        assert_eq!(m.name, "mux4");
        assert_eq!(m.ports.entries.len(), 7);
        assert_eq!(m.processes.len(), 1);
        assert_eq!(m.processes[0].kind, ProcessKind::Combinational);
        assert_eq!(m.ports.width_of("select"), Some(2));
    }

    #[test]
    fn mux2_exemplar_parses() {
        let m = parse_hdl(bundled::MUX2_VERILOG).unwrap();
        assert_eq!(m.ports.entries.len(), 4);
        let Stmt::Block(items) = &m.processes[0].body else {
            panic!("block expected")
        };
        assert!(matches!(items[0], Stmt::If { .. }));
    }

    #[test]
    fn for_loop_is_named() {
        let src = "module m(input a, output reg y);\n  always @(*) begin\n    for (i = 0; i < 2; i = i + 1) y = a;\n  end\nendmodule\n";
        match parse_hdl(src) {
            Err(ExprError::Unsupported { construct, pos }) => {
                assert_eq!(construct, "for");
                assert_eq!(pos.line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn case_with_default_and_non_ansi_ports() {
        let src = "
module m (sel, a, b, y);
  input [1:0] sel;
  input a, b;
  output y;
  reg y;
  localparam ONE = 2'd1;
  always @* begin
    case (sel)
      2'd0, ONE: y = a;
      2'b10: y = b;
      default: y = 1'b0;
    endcase
  end
endmodule";
        let m = parse_hdl(src).unwrap();
        assert_eq!(m.ports.width_of("sel"), Some(2));
        assert_eq!(m.ports.width_of("y"), Some(1));
        assert!(m.signals.is_empty());
        let Stmt::Block(items) = &m.processes[0].body else {
            panic!()
        };
        let Stmt::Case { arms, default, .. } = &items[0] else {
            panic!()
        };
        assert_eq!(arms.len(), 2);
        assert_eq!(arms[0].labels.len(), 2);
        assert_eq!(
            arms[0].labels[1],
            Expr::Literal(RawLiteral {
                width: Some(2),
                value: 1
            })
        );
        assert!(default.is_some());
    }

    #[test]
    fn clocked_sensitivity_and_instances() {
        let src = "
module top (input clk, input rst_n, input [7:0] d, output [7:0] q);
  wire [7:0] mid;
  always_ff @(posedge clk or negedge rst_n) begin end
  stage #(.W(8)) s0 (.d(d), .q(mid));
  stage s1 (.d(mid), .q(q));
  assign unused = d == 8'd3 ? 1'b1 : 1'b0;
endmodule";
        let m = parse_hdl(src).unwrap();
        assert_eq!(m.processes[0].clock(), Some("clk"));
        assert_eq!(m.instances.len(), 2);
        assert_eq!(m.instances[1].bindings[0].0, "d");
        assert_eq!(m.signals.get("mid"), Some(&8));
        assert_eq!(m.assigns.len(), 1);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_hdl("module m(input a);\n  always @(*) y = ;\nendmodule").unwrap_err();
        assert_eq!(err.pos().line, 2);
        assert!(parse_hdl("module m(input a);").is_err());
        assert!(matches!(
            parse_hdl("module m(input a); initial begin end endmodule"),
            Err(ExprError::Unsupported { .. })
        ));
        assert!(matches!(
            parse_hdl("module m(input [3:0] a, output y); assign y = a[0]; endmodule"),
            Err(ExprError::Unsupported { .. })
        ));
    }
}
