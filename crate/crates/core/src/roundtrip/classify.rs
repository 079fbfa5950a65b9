// SPDX-License-Identifier: Apache-2.0

//! Outcome labels as a pure function of the collected evidence.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Semantic {
    Equivalent,
    /// Equal on shared results; one side lacks some result columns.
    EquivalentOnShared,
    NotEquivalent,
    /// The reconstruction could not be parsed or compared.
    Unavailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SimVerdict {
    Pass,
    Fail,
    Unavailable,
}

/// Whether a deterministic re-extraction of the forward HDL matches the
/// original table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArbiterVerdict {
    Matches,
    Differs,
    Unavailable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Evidence {
    pub textual_match: bool,
    pub semantic: Semantic,
    pub sim: SimVerdict,
    pub arbiter: ArbiterVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    M,
    #[serde(rename = "M_SP")]
    MSp,
    #[serde(rename = "X_EQ")]
    XEq,
    #[serde(rename = "X_FW")]
    XFw,
    #[serde(rename = "X_FW_NS")]
    XFwNs,
    #[serde(rename = "X_INV")]
    XInv,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::M => "M",
            Label::MSp => "M_SP",
            Label::XEq => "X_EQ",
            Label::XFw => "X_FW",
            Label::XFwNs => "X_FW_NS",
            Label::XInv => "X_INV",
        }
    }

    pub fn is_match(self) -> bool {
        matches!(self, Label::M | Label::MSp)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub label: Label,
    pub evidence: Evidence,
    pub caveats: Vec<String>,
}

pub fn classify_outcome(evidence: &Evidence) -> Outcome {
    let mut caveats = Vec::new();
    let matched = evidence.textual_match || evidence.semantic == Semantic::Equivalent;
    let label = if matched {
        match evidence.sim {
            SimVerdict::Pass => Label::M,
            SimVerdict::Fail => Label::MSp,
            SimVerdict::Unavailable => {
                caveats.push("no simulation evidence; M and M_SP not distinguished".into());
                Label::M
            }
        }
    } else if evidence.semantic == Semantic::EquivalentOnShared {
        Label::XEq
    } else {
        match evidence.arbiter {
            ArbiterVerdict::Differs => match evidence.sim {
                SimVerdict::Pass => Label::XFwNs,
                SimVerdict::Fail => Label::XFw,
                SimVerdict::Unavailable => {
                    caveats
                        .push("no simulation evidence; X_FW and X_FW_NS not distinguished".into());
                    Label::XFw
                }
            },
            ArbiterVerdict::Matches => Label::XInv,
            ArbiterVerdict::Unavailable => {
                caveats.push(
                    "forward HDL could not be re-extracted; blamed on the forward transform".into(),
                );
                Label::XFw
            }
        }
    };
    Outcome {
        label,
        evidence: *evidence,
        caveats,
    }
}
