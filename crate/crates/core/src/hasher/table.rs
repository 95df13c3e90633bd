use std::fmt;

use super::{HashError, Step};

/// The non-backtracking attribution: a labelling `s: [4] -> steps` and, for
/// each row label `λ`, a bijection from trits `{1,2,3}` onto the three steps
/// other than `s(λ)`.
///
/// After a step `S`, the next trit is read in row `s^-1(S^-1)`, which by
/// construction never offers `S^-1`. The very first trit is read in
/// `first_row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AttributionTable {
    labels: [Step; 4],
    rows: [[Step; 3]; 4],
    first_row: u8,
}

impl AttributionTable {
    /// Validates and builds a table; `first_row` is a row label in `1..=4`.
    pub fn new(labels: [Step; 4], rows: [[Step; 3]; 4], first_row: u8) -> Result<Self, HashError> {
        for s in Step::ALL {
            if !labels.contains(&s) {
                return Err(HashError::InvalidTable(format!("label map misses {s}")));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            let excluded = labels[i];
            for s in Step::ALL {
                let count = row.iter().filter(|&&x| x == s).count();
                let expected = usize::from(s != excluded);
                if count != expected {
                    return Err(HashError::InvalidTable(format!(
                        "row {} must contain every step except {excluded} exactly once",
                        i + 1
                    )));
                }
            }
        }
        if !(1..=4).contains(&first_row) {
            return Err(HashError::InvalidTable(format!("first row {first_row} is not in 1..=4")));
        }
        Ok(AttributionTable { labels, rows, first_row })
    }

    /// The concrete attribution table, starting in row 1.
    pub fn default_table() -> Self {
        use Step::*;
        AttributionTable {
            labels: [A, B, AInv, BInv],
            rows: [
                [B, AInv, BInv],
                [A, AInv, BInv],
                [A, BInv, B],
                [A, AInv, B],
            ],
            first_row: 1,
        }
    }

    /// Same table, entering the first trit through row `row`.
    pub fn with_first_row(mut self, row: u8) -> Result<Self, HashError> {
        if !(1..=4).contains(&row) {
            return Err(HashError::InvalidTable(format!("first row {row} is not in 1..=4")));
        }
        self.first_row = row;
        Ok(self)
    }

    pub fn first_row(&self) -> u8 {
        self.first_row
    }

    /// `s(λ)`.
    pub fn label(&self, row: u8) -> Step {
        self.labels[row as usize - 1]
    }

    /// `s_λ` as the array `[s_λ(1), s_λ(2), s_λ(3)]`.
    pub fn row(&self, row: u8) -> [Step; 3] {
        self.rows[row as usize - 1]
    }

    /// `s^-1(step)`.
    pub fn label_of(&self, step: Step) -> u8 {
        self.labels.iter().position(|&s| s == step).expect("labels are a bijection") as u8 + 1
    }

    /// Row consulted after `last`: `s^-1(last^-1)`.
    #[inline]
    pub fn row_after(&self, last: Step) -> u8 {
        self.label_of(last.inverse())
    }

    /// The step chosen by `trit` given the previous step (or `None` at the
    /// start of the input).
    #[inline]
    pub fn next_step(&self, last: Option<Step>, trit: u8) -> Result<Step, HashError> {
        let row = last.map_or(self.first_row, |s| self.row_after(s));
        self.lookup(row, trit)
    }

    #[inline]
    pub fn lookup(&self, row: u8, trit: u8) -> Result<Step, HashError> {
        if !(1..=3).contains(&trit) {
            return Err(HashError::InvalidTrit(trit));
        }
        Ok(self.rows[row as usize - 1][trit as usize - 1])
    }

    /// Parses a 4x3 grid, one row per line in label order, e.g. `B A^-1 B^-1`.
    /// Uses the default labelling `s = (A, B, A^-1, B^-1)` and first row 1.
    pub fn parse_grid(text: &str) -> Result<Self, HashError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 4 {
            return Err(HashError::InvalidTable(format!("expected 4 rows, found {}", lines.len())));
        }
        let mut rows = [[Step::A; 3]; 4];
        for (i, line) in lines.iter().enumerate() {
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != 3 {
                return Err(HashError::InvalidTable(format!("row {} needs 3 cells", i + 1)));
            }
            for (j, cell) in cells.iter().enumerate() {
                rows[i][j] = cell.parse()?;
            }
        }
        Self::new(Self::default_table().labels, rows, 1)
    }
}

impl Default for AttributionTable {
    fn default() -> Self {
        Self::default_table()
    }
}

impl fmt::Display for AttributionTable {
    /// The grid format accepted by [`AttributionTable::parse_grid`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{} {} {}", row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Step::*;

    #[test]
    fn default_table_values() {
        let t = AttributionTable::default_table();
        // after A the row is s_3
        assert_eq!(t.next_step(Some(A), 3).unwrap(), B);
        // after B^-1 the row is s_2
        assert_eq!(t.next_step(Some(BInv), 1).unwrap(), A);
        assert_eq!(t.next_step(None, 1).unwrap(), B);
        assert_eq!(t.next_step(None, 2).unwrap(), AInv);
        // rows keyed by last step
        assert_eq!(t.row(t.row_after(AInv)), [B, AInv, BInv]);
        assert_eq!(t.row(t.row_after(BInv)), [A, AInv, BInv]);
        assert_eq!(t.row(t.row_after(A)), [A, BInv, B]);
        assert_eq!(t.row(t.row_after(B)), [A, AInv, B]);
    }

    #[test]
    fn rows_never_backtrack() {
        let t = AttributionTable::default_table();
        for last in Step::ALL {
            let row = t.row(t.row_after(last));
            assert!(!row.contains(&last.inverse()));
            for s in Step::ALL {
                assert_eq!(row.contains(&s), s != last.inverse());
            }
        }
    }

    #[test]
    fn invalid_trits_and_tables() {
        let t = AttributionTable::default_table();
        assert_eq!(t.next_step(None, 4), Err(HashError::InvalidTrit(4)));
        assert_eq!(t.next_step(Some(A), 0), Err(HashError::InvalidTrit(0)));
        let bad_rows = [[A, B, AInv], [A, AInv, BInv], [A, BInv, B], [A, AInv, B]];
        assert!(AttributionTable::new([A, B, AInv, BInv], bad_rows, 1).is_err());
        assert!(t.with_first_row(5).is_err());
    }

    #[test]
    fn grid_roundtrip() {
        let t = AttributionTable::default_table();
        let text = t.to_string();
        assert_eq!(text, "B A^-1 B^-1\nA A^-1 B^-1\nA B^-1 B\nA A^-1 B\n");
        assert_eq!(AttributionTable::parse_grid(&text).unwrap(), t);
        assert!(AttributionTable::parse_grid("A B\n").is_err());
    }
}
