// SPDX-License-Identifier: Apache-2.0

//! Syntax tree for the supported Verilog subset.

use std::collections::BTreeMap;

use crate::bitvec::RawLiteral;
use crate::expr::Expr;
use crate::lexer::Pos;
use crate::model::PortMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HdlModule {
    pub name: String,
    pub ports: PortMap,
    /// Internal `wire`/`reg`/`logic` signals and their widths.
    pub signals: BTreeMap<String, u32>,
    pub params: BTreeMap<String, RawLiteral>,
    pub processes: Vec<Process>,
    pub assigns: Vec<ContAssign>,
    pub instances: Vec<ModuleInstance>,
    pub pos: Pos,
}

impl HdlModule {
    pub fn width_of(&self, name: &str) -> Option<u32> {
        self.ports
            .width_of(name)
            .or_else(|| self.signals.get(name).copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub rising: bool,
    pub signal: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcessKind {
    /// Edge-triggered; the first edge is the clock, later ones are
    /// asynchronous controls.
    Clocked {
        edges: Vec<Edge>,
    },
    Combinational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub kind: ProcessKind,
    pub body: Stmt,
    pub pos: Pos,
}

impl Process {
    pub fn clock(&self) -> Option<&str> {
        match &self.kind {
            ProcessKind::Clocked { edges } => edges.first().map(|e| e.signal.as_str()),
            ProcessKind::Combinational => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseArm {
    pub labels: Vec<Expr>,
    pub body: Stmt,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Block(Vec<Stmt>),
    If {
        cond: Expr,
        then: Box<Stmt>,
        els: Option<Box<Stmt>>,
        pos: Pos,
    },
    Case {
        subject: Expr,
        arms: Vec<CaseArm>,
        default: Option<Box<Stmt>>,
        pos: Pos,
    },
    Assign {
        lhs: String,
        rhs: Expr,
        blocking: bool,
        pos: Pos,
    },
    Empty,
}

impl Stmt {
    /// Names assigned anywhere in the tree.
    pub fn assigned(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_assigned(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_assigned<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Stmt::Block(items) => items.iter().for_each(|s| s.collect_assigned(out)),
            Stmt::If { then, els, .. } => {
                then.collect_assigned(out);
                if let Some(e) = els {
                    e.collect_assigned(out);
                }
            }
            Stmt::Case { arms, default, .. } => {
                arms.iter().for_each(|a| a.body.collect_assigned(out));
                if let Some(d) = default {
                    d.collect_assigned(out);
                }
            }
            Stmt::Assign { lhs, .. } => out.push(lhs),
            Stmt::Empty => {}
        }
    }

    /// Number of leaf branches, counting an absent `else` or `default` as
    /// an empty leaf.
    pub fn leaf_count(&self) -> usize {
        match self {
            Stmt::Block(items) => items.iter().map(Stmt::leaf_count).product::<usize>().max(1),
            Stmt::If { then, els, .. } => {
                then.leaf_count() + els.as_ref().map_or(1, |e| e.leaf_count())
            }
            Stmt::Case { arms, default, .. } => {
                arms.iter()
                    .map(|a| a.body.leaf_count() * a.labels.len())
                    .sum::<usize>()
                    + default.as_ref().map_or(1, |d| d.leaf_count())
            }
            Stmt::Assign { .. } | Stmt::Empty => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContAssign {
    pub lhs: String,
    pub rhs: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleInstance {
    pub unit: String,
    pub name: String,
    /// Named `.port(expr)` bindings in source order.
    pub bindings: Vec<(String, Expr)>,
    pub pos: Pos,
}
