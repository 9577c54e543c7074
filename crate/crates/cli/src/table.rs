//! Aligned plain-text rendering of CSV output.

use crate::error::CliResult;

pub const SEPARATOR: &str = " | ";

fn numeric(s: &str) -> bool {
    s.parse::<f64>().is_ok()
}

/// Renders `#` comment lines verbatim and the CSV body as columns joined by
/// `SEPARATOR`; numbers are right-aligned, text left-aligned. Cell text is
/// never altered.
pub fn render(input: &str) -> CliResult<String> {
    let mut out = String::new();
    let mut body = String::new();
    for line in input.lines() {
        if line.starts_with('#') {
            out.push_str(line);
            out.push('\n');
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(body.as_bytes());
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Ok(out);
    }
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut width = vec![0usize; cols];
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            width[i] = width[i].max(cell.chars().count());
        }
    }
    for (r, row) in rows.iter().enumerate() {
        let cells: Vec<String> = (0..cols)
            .map(|i| {
                let cell = row.get(i).map(String::as_str).unwrap_or("");
                if r > 0 && numeric(cell) {
                    format!("{cell:>w$}", w = width[i])
                } else {
                    format!("{cell:<w$}", w = width[i])
                }
            })
            .collect();
        out.push_str(cells.join(SEPARATOR).trim_end());
        out.push('\n');
        if r == 0 {
            let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligns_and_keeps_values() {
        let t = render("# seed=0\na,b\n1.5,x\n10,yy\n").unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "# seed=0");
        assert_eq!(lines[1], "a   | b");
        assert_eq!(lines[2], "----+---");
        assert_eq!(lines[3], "1.5 | x");
        assert_eq!(lines[4], " 10 | yy");
    }
}
