// SPDX-License-Identifier: Apache-2.0

//! Prompt templates for the forward and inverse transforms.

use crate::bundled::{MUX2_CSV, MUX2_VERILOG};
use crate::codegen::module_header;
use crate::hdl::Schema;
use crate::model::{validate_lct, Clocking, Lct, Violation};
use crate::table_io::serialize_csv;

/// Which way a request transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TransformKind {
    Forward,
    Inverse,
}

/// Structured input carried alongside the prompt so that local backends
/// need not parse prose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Forward(Lct),
    Inverse { hdl: String, schema: Schema },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformRequest {
    pub kind: TransformKind,
    pub unit: String,
    pub prompt: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformResponse {
    /// Full text as returned.
    pub raw: String,
    /// The fenced code block of the reply, or the whole reply.
    pub artifact: String,
    pub backend: String,
}

fn fence(lang: &str, body: &str) -> String {
    let body = body.trim_end_matches('\n');
    format!("```{lang}\n{body}\n```\n")
}

/// Forward prompt: clocking directive, column counts, the table as CSV and
/// the port map, in that order.
pub fn build_forward_prompt(table: &Lct) -> Result<TransformRequest, Vec<Violation>> {
    let violations = validate_lct(table);
    if !violations.is_empty() {
        return Err(violations);
    }
    let clocking = match table.clocking {
        Clocking::Clocked => {
            "Clocking: clocked. Write one edge-triggered process on the rising clock edge with nonblocking assignments; a register not assigned in a row keeps its value."
        }
        Clocking::Combinational => {
            "Clocking: combinational. Write one combinational process with blocking assignments and no latches."
        }
    };
    let mut p = String::new();
    p.push_str("Generate a synthesizable Verilog module from the logic condition table below. Rows are checked top to bottom and the first row whose conditions hold decides the outputs; X is a don't-care.\n\n");
    p.push_str(clocking);
    p.push_str("\n\n");
    p.push_str(&format!(
        "Columns: the first {} columns are input conditions ({}) and the next {} are output results ({}).\n\n",
        table.conditions.len(),
        table.condition_names().join(", "),
        table.results.len(),
        table.results.join(", ")
    ));
    p.push_str("Table:\n");
    p.push_str(&fence("csv", &serialize_csv(table)));
    p.push_str("\nPort map:\n");
    p.push_str(&fence("verilog", &module_header(table)));
    p.push_str("\nAnswer with the complete module in one verilog code block.\n");
    Ok(TransformRequest {
        kind: TransformKind::Forward,
        unit: table.name.clone(),
        prompt: p,
        payload: Payload::Forward(table.clone()),
    })
}

/// Inverse prompt: what a table is, the worked two-input multiplexer pair,
/// the module to read and the column headers to fill, in that order.
pub fn build_inverse_prompt(unit: &str, hdl: &str, schema: &Schema) -> TransformRequest {
    let headers: Vec<String> = schema
        .conditions
        .iter()
        .map(|c| c.name())
        .chain(schema.results.iter().cloned())
        .collect();
    let mut p = String::new();
    p.push_str("A logic condition table lists one case per row. The leading columns are input conditions and the trailing columns are output results. A condition cell holds a value or X (don't care); a result cell holds a value or the name of the signal it passes through. Rows are checked top to bottom and the first match wins. For a clocked design, a result that names its own column keeps its value.\n\n");
    p.push_str("Example Verilog:\n");
    p.push_str(&fence("verilog", MUX2_VERILOG));
    p.push_str("\nIts table:\n");
    p.push_str(&fence("csv", MUX2_CSV));
    p.push_str("\nVerilog to evaluate:\n");
    p.push_str(&fence("verilog", hdl));
    p.push_str("\nReconstruct its table using exactly these column headers, conditions first:\n");
    p.push_str(&fence("csv", &headers.join(",")));
    p.push_str("\nAnswer with the table in one csv code block, header row first.\n");
    TransformRequest {
        kind: TransformKind::Inverse,
        unit: unit.to_string(),
        prompt: p,
        payload: Payload::Inverse {
            hdl: hdl.to_string(),
            schema: schema.clone(),
        },
    }
}

/// The body of the first fenced block, or the whole text when there is
/// none.
pub fn extract_artifact(text: &str) -> String {
    fenced_blocks(text)
        .into_iter()
        .next()
        .unwrap_or_else(|| text.trim().to_string())
}

/// Bodies of all fenced blocks in order.
pub fn fenced_blocks(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(body) => out.push(body.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(body) = current.as_mut() {
            body.push(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::table_io::serialize_unit;

    #[test]
    fn forward_prompt_sections_in_order() {
        let t = bundled::table1();
        let req = build_forward_prompt(&t).unwrap();
        let p = &req.prompt;
        let order = [
            p.find("Clocking: combinational").unwrap(),
            p.find("Columns: the first 2").unwrap(),
            p.find("```csv").unwrap(),
            p.find("```verilog").unwrap(),
        ];
        assert!(order.windows(2).all(|w| w[0] < w[1]));
        let blocks = fenced_blocks(p);
        assert_eq!(
            blocks[0].trim_end(),
            serialize_unit(&t).unwrap().1.trim_end()
        );
        assert_eq!(req, build_forward_prompt(&t).unwrap());
    }

    #[test]
    fn clocked_prompt_names_clocking() {
        let req = build_forward_prompt(&bundled::table2()).unwrap();
        assert!(req.prompt.contains("Clocking: clocked"));
        assert!(req.prompt.contains("input  wire clk"));
    }

    #[test]
    fn inverse_prompt_embeds_exemplar_and_headers() {
        let t = bundled::table2();
        let schema = Schema::of(&t);
        let req = build_inverse_prompt("regmux2", "module x; endmodule", &schema);
        let blocks = fenced_blocks(&req.prompt);
        assert_eq!(blocks.len(), 4);
        assert_eq!(blocks[0].trim(), MUX2_VERILOG.trim());
        assert_eq!(blocks[1].trim(), MUX2_CSV.trim());
        assert_eq!(blocks[2], "module x; endmodule");
        assert_eq!(blocks[3], "rst_n,ready,valid_in,select,valid_out,data_out");
        assert_eq!(
            req,
            build_inverse_prompt("regmux2", "module x; endmodule", &schema)
        );
    }

    #[test]
    fn artifact_falls_back_to_whole_text() {
        assert_eq!(
            extract_artifact("here:\n```csv\na,b\n1,2\n```\nthanks"),
            "a,b\n1,2"
        );
        assert_eq!(extract_artifact("  a,b\n"), "a,b");
    }
}
