use alloc::vec;
use alloc::vec::Vec;

use crate::program::SortKey;
use crate::table::{is_monotone, Direction, Table};

/// Infers a composite sort key from the row order of `tout`.
///
/// Column `i` of `tout` is taken to correspond to column `i` of `child`. The
/// first key is the lowest-indexed column that is monotone over all rows;
/// each further key must be monotone within every run of rows that agree on
/// the keys chosen so far. Columns that are constant within every run add
/// nothing and are skipped.
pub fn sort_keys(tout: &Table, child: &Table) -> Vec<SortKey> {
    if tout.width() != child.width() {
        return Vec::new();
    }
    let mut runs: Vec<(usize, usize)> = vec![(0, tout.height())];
    let mut keys: Vec<SortKey> = Vec::new();
    loop {
        runs.retain(|&(a, b)| b - a > 1);
        if runs.is_empty() {
            return keys;
        }
        let next = (0..tout.width()).filter(|c| keys.iter().all(|k| k.col != *c)).find_map(|c| {
            let col = tout.column(c);
            let varies = runs.iter().any(|&(a, b)| col[a..b].iter().any(|v| *v != col[a]));
            if !varies {
                return None;
            }
            [Direction::Asc, Direction::Desc]
                .into_iter()
                .find(|&dir| runs.iter().all(|&(a, b)| is_monotone(col[a..b].iter(), dir)))
                .map(|dir| SortKey { col: c, dir })
        });
        let Some(key) = next else {
            return keys;
        };
        let col = tout.column(key.col);
        let mut split = Vec::new();
        for &(a, b) in &runs {
            let mut start = a;
            for i in a + 1..b {
                if col[i] != col[start] {
                    split.push((start, i));
                    start = i;
                }
            }
            split.push((start, b));
        }
        runs = split;
        keys.push(key);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::order;
    use crate::table::{tables_equal, ColumnSchema};
    use crate::value::{CType, Value};

    fn ints(cols: &[&[i64]]) -> Table {
        let schema = (0..cols.len()).map(|i| ColumnSchema::new(alloc::format!("c{i}"), CType::Int)).collect();
        Table::from_columns(schema, cols.iter().map(|c| c.iter().map(|&k| Value::Int(k)).collect()).collect()).unwrap()
    }

    #[test]
    fn composite_key() {
        let tout = ints(&[&[1, 1, 2], &[3, 5, 4]]);
        let child = ints(&[&[2, 1, 1], &[4, 5, 3]]);
        let keys = sort_keys(&tout, &child);
        assert_eq!(keys, vec![SortKey::asc(0), SortKey::asc(1)]);
        assert!(tables_equal(&tout, &order(&child, &keys).unwrap(), true));
    }

    #[test]
    fn descending_and_unsorted() {
        let t = ints(&[&[5, 4, 1]]);
        assert_eq!(sort_keys(&t, &t), vec![SortKey::desc(0)]);
        let u = ints(&[&[2, 1, 3]]);
        assert!(sort_keys(&u, &u).is_empty());
    }

    #[test]
    fn constant_column_is_skipped() {
        let t = ints(&[&[7, 7, 7], &[3, 2, 1]]);
        assert_eq!(sort_keys(&t, &t), vec![SortKey::desc(1)]);
    }
}
