//! Latin squares, orthogonal families and the Latin rectangles cut from them.
//!
//! Symbols are 0-based throughout. A rectangle's rows are radio channels and
//! its columns are the time-slots of one superframe; the cells holding a given
//! symbol form that symbol's [`TransmissionPattern`].

use std::fmt::{self, Write as _};

use thiserror::Error;

pub type Symbol = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatinError {
    #[error("order {order} is not a prime >= 2 (smallest prime >= {order} is {suggestion})")]
    NotPrime { order: usize, suggestion: usize },
    #[error("grid must be non-empty")]
    Empty,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("symbol {symbol} at ({row}, {col}) is outside the alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: Symbol, row: usize, col: usize, alphabet: usize },
    #[error("symbol {symbol} repeats in row {row} (columns {first} and {second})")]
    RepeatedInRow { symbol: Symbol, row: usize, first: usize, second: usize },
    #[error("symbol {symbol} repeats in column {col} (rows {first} and {second})")]
    RepeatedInColumn { symbol: Symbol, col: usize, first: usize, second: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("squares {first} and {second} of the family are not orthogonal")]
    NotOrthogonal { first: usize, second: usize },
    #[error("an orthogonal family of order {order} holds at most {max} squares, got {found}")]
    FamilyTooLarge { order: usize, max: usize, found: usize },
    #[error("{rows}x{cols} cut does not fit in a square of order {order}")]
    CutTooLarge { rows: usize, cols: usize, order: usize },
    #[error("square index {index} out of range for a family of {len}")]
    NoSuchSquare { index: usize, len: usize },
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    NoSuchSymbol { symbol: Symbol, alphabet: usize },
    #[error("patterns come from {left_rows}x{left_cols} and {right_rows}x{right_cols} rectangles")]
    DimensionMismatch { left_rows: usize, left_cols: usize, right_rows: usize, right_cols: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: usize) -> usize {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Row-major symbol grid shared by squares and rectangles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Symbol>,
}

impl Grid {
    fn from_rows(rows: Vec<Vec<Symbol>>) -> Result<Self, LatinError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(Vec::len).ok_or(LatinError::Empty)?;
        if n_cols == 0 {
            return Err(LatinError::Empty);
        }
        let mut cells = Vec::with_capacity(n_rows * n_cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(LatinError::Ragged { row: r, found: row.len(), expected: n_cols });
            }
            cells.extend(row);
        }
        Ok(Grid { rows: n_rows, cols: n_cols, cells })
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> Symbol {
        self.cells[row * self.cols + col]
    }

    fn row(&self, row: usize) -> &[Symbol] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    /// Checks the alphabet bound and row/column distinctness.
    fn validate(&self, alphabet: usize) -> Result<(), LatinError> {
        for r in 0..self.rows {
            let mut seen = vec![usize::MAX; alphabet];
            for c in 0..self.cols {
                let s = self.get(r, c);
                if s as usize >= alphabet {
                    return Err(LatinError::SymbolOutOfRange { symbol: s, row: r, col: c, alphabet });
                }
                if seen[s as usize] != usize::MAX {
                    return Err(LatinError::RepeatedInRow { symbol: s, row: r, first: seen[s as usize], second: c });
                }
                seen[s as usize] = c;
            }
        }
        for c in 0..self.cols {
            let mut seen = vec![usize::MAX; alphabet];
            for r in 0..self.rows {
                let s = self.get(r, c) as usize;
                if seen[s] != usize::MAX {
                    return Err(LatinError::RepeatedInColumn { symbol: s as Symbol, col: c, first: seen[s], second: r });
                }
                seen[s] = r;
            }
        }
        Ok(())
    }

    fn to_rows(&self) -> Vec<Vec<Symbol>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// An order-q grid in which every row and every column is a permutation of `0..q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatinSquare {
    grid: Grid,
}

impl LatinSquare {
    pub fn new(rows: Vec<Vec<Symbol>>) -> Result<Self, LatinError> {
        let grid = Grid::from_rows(rows)?;
        if grid.rows != grid.cols {
            return Err(LatinError::Ragged { row: grid.rows, found: grid.rows, expected: grid.cols });
        }
        grid.validate(grid.cols)?;
        Ok(LatinSquare { grid })
    }

    /// Builds a square from a cell function, validating the result.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> Symbol) -> Result<Self, LatinError> {
        Self::new((0..order).map(|i| (0..order).map(|j| f(i, j)).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.grid.rows
    }

    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.grid.get(row, col)
    }

    pub fn row(&self, row: usize) -> &[Symbol] {
        self.grid.row(row)
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        self.grid.to_rows()
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_grid(f, &self.grid)
    }
}

/// True iff superimposing `e` and `f` yields q² distinct ordered pairs.
pub fn are_orthogonal(e: &LatinSquare, f: &LatinSquare) -> Result<bool, LatinError> {
    let q = e.order();
    if q != f.order() {
        return Err(LatinError::OrderMismatch { left: q, right: f.order() });
    }
    let mut seen = vec![false; q * q];
    for (a, b) in e.grid.cells.iter().zip(&f.grid.cells) {
        let key = *a as usize * q + *b as usize;
        if seen[key] {
            return Ok(false);
        }
        seen[key] = true;
    }
    Ok(true)
}

/// A set of pairwise-orthogonal Latin squares sharing one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalFamily {
    order: usize,
    squares: Vec<LatinSquare>,
}

impl OrthogonalFamily {
    pub fn new(squares: Vec<LatinSquare>) -> Result<Self, LatinError> {
        let order = squares.first().map(LatinSquare::order).ok_or(LatinError::Empty)?;
        if let Some(s) = squares.iter().find(|s| s.order() != order) {
            return Err(LatinError::OrderMismatch { left: order, right: s.order() });
        }
        let max = order.saturating_sub(1).max(1);
        if squares.len() > max {
            return Err(LatinError::FamilyTooLarge { order, max, found: squares.len() });
        }
        for a in 0..squares.len() {
            for b in a + 1..squares.len() {
                if !are_orthogonal(&squares[a], &squares[b])? {
                    return Err(LatinError::NotOrthogonal { first: a, second: b });
                }
            }
        }
        Ok(OrthogonalFamily { order, squares })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    pub fn square(&self, index: usize) -> Result<&LatinSquare, LatinError> {
        self.squares.get(index).ok_or(LatinError::NoSuchSquare { index, len: self.squares.len() })
    }

    /// Cuts square `index` down to `channels x slots`, remembering its index.
    pub fn rectangle(&self, index: usize, channels: usize, slots: usize) -> Result<LatinRectangle, LatinError> {
        let mut r = cut_rectangle(self.square(index)?, channels, slots)?;
        r.index = index;
        Ok(r)
    }

    /// Every square cut to the same shape, in family order.
    pub fn rectangles(&self, channels: usize, slots: usize) -> Result<Vec<LatinRectangle>, LatinError> {
        (0..self.len()).map(|i| self.rectangle(i, channels, slots)).collect()
    }

    /// One block per square, headed `q q q index`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.squares.iter().enumerate() {
            write_block(&mut out, self.order, &s.grid, i);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LatinError> {
        let blocks = parse_blocks(text)?;
        let mut squares = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.header.1 != b.header.0 || b.header.2 != b.header.0 {
                return Err(LatinError::Parse { line: b.line, message: "family blocks must be full squares".into() });
            }
            if b.header.3 != squares.len() {
                return Err(LatinError::Parse { line: b.line, message: format!("expected square index {}", squares.len()) });
            }
            squares.push(LatinSquare::new(b.rows)?);
        }
        Self::new(squares)
    }
}

/// Complete family of q−1 mutually orthogonal squares for prime q.
///
/// Square `a` (for `a` in `1..q`) has cell `(i, j) = (a·i + j) mod q`; it is
/// stored at index `a − 1`.
pub fn generate_mols(q: usize) -> Result<OrthogonalFamily, LatinError> {
    if !is_prime(q) {
        return Err(LatinError::NotPrime { order: q, suggestion: next_prime(q) });
    }
    let squares = (1..q)
        .map(|a| LatinSquare::from_fn(q, |i, j| ((a * i + j) % q) as Symbol))
        .collect::<Result<Vec<_>, _>>()?;
    OrthogonalFamily::new(squares)
}

/// `channels x slots` grid over a q-symbol alphabet with distinct symbols
/// along every row and column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatinRectangle {
    alphabet: usize,
    index: usize,
    grid: Grid,
}

/// Top-left `channels x slots` block of `square`. The result has index 0;
/// use [`OrthogonalFamily::rectangle`] to keep the square's family index.
pub fn cut_rectangle(square: &LatinSquare, channels: usize, slots: usize) -> Result<LatinRectangle, LatinError> {
    let q = square.order();
    if channels == 0 || slots == 0 {
        return Err(LatinError::Empty);
    }
    if channels > q || slots > q {
        return Err(LatinError::CutTooLarge { rows: channels, cols: slots, order: q });
    }
    let cells = (0..channels).flat_map(|i| square.row(i)[..slots].iter().copied()).collect();
    Ok(LatinRectangle { alphabet: q, index: 0, grid: Grid { rows: channels, cols: slots, cells } })
}

impl LatinRectangle {
    pub fn new(alphabet: usize, rows: Vec<Vec<Symbol>>, index: usize) -> Result<Self, LatinError> {
        let grid = Grid::from_rows(rows)?;
        if grid.rows > alphabet || grid.cols > alphabet {
            return Err(LatinError::CutTooLarge { rows: grid.rows, cols: grid.cols, order: alphabet });
        }
        grid.validate(alphabet)?;
        Ok(LatinRectangle { alphabet, index, grid })
    }

    pub fn channels(&self) -> usize {
        self.grid.rows
    }

    pub fn slots(&self) -> usize {
        self.grid.cols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    /// Index of the source square within its family.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn get(&self, channel: usize, slot: usize) -> Symbol {
        self.grid.get(channel, slot)
    }

    pub fn row(&self, channel: usize) -> &[Symbol] {
        self.grid.row(channel)
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        self.grid.to_rows()
    }

    pub fn pattern(&self, symbol: Symbol) -> Result<TransmissionPattern, LatinError> {
        pattern_of(self, symbol)
    }

    /// Patterns of every symbol in the alphabet, indexed by symbol.
    pub fn patterns(&self) -> Vec<TransmissionPattern> {
        let mut out: Vec<TransmissionPattern> = (0..self.alphabet as Symbol)
            .map(|symbol| TransmissionPattern { symbol, channels: self.grid.rows, slots: self.grid.cols, hops: Vec::new() })
            .collect();
        for channel in 0..self.grid.rows {
            for slot in 0..self.grid.cols {
                out[self.get(channel, slot) as usize].hops.push(Hop { channel, slot });
            }
        }
        out
    }

    /// Header `q rows cols index` followed by one line per row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_block(&mut out, self.alphabet, &self.grid, self.index);
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LatinError> {
        let mut blocks = parse_blocks(text)?;
        if blocks.len() != 1 {
            return Err(LatinError::Parse { line: 1, message: format!("expected one rectangle, found {}", blocks.len()) });
        }
        let b = blocks.remove(0);
        Self::new(b.header.0, b.rows, b.header.3)
    }
}

impl fmt::Display for LatinRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_grid(f, &self.grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hop {
    pub channel: usize,
    pub slot: usize,
}

/// The cells of one symbol within a rectangle, sorted by channel.
///
/// No two hops share a channel or a slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransmissionPattern {
    symbol: Symbol,
    channels: usize,
    slots: usize,
    hops: Vec<Hop>,
}

impl TransmissionPattern {
    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// `(channels, slots)` of the rectangle the pattern came from.
    pub fn shape(&self) -> (usize, usize) {
        (self.channels, self.slots)
    }
}

pub fn pattern_of(rect: &LatinRectangle, symbol: Symbol) -> Result<TransmissionPattern, LatinError> {
    if symbol as usize >= rect.alphabet {
        return Err(LatinError::NoSuchSymbol { symbol, alphabet: rect.alphabet });
    }
    // at most one hit per row, so scanning rows in order yields channel order
    let hops = (0..rect.channels())
        .filter_map(|channel| rect.row(channel).iter().position(|&s| s == symbol).map(|slot| Hop { channel, slot }))
        .collect();
    Ok(TransmissionPattern { symbol, channels: rect.channels(), slots: rect.slots(), hops })
}

/// Number of (channel, slot) cells shared by two patterns.
pub fn overlap_count(p1: &TransmissionPattern, p2: &TransmissionPattern) -> Result<usize, LatinError> {
    if p1.shape() != p2.shape() {
        return Err(LatinError::DimensionMismatch {
            left_rows: p1.channels,
            left_cols: p1.slots,
            right_rows: p2.channels,
            right_cols: p2.slots,
        });
    }
    // both sorted by channel with one hop per channel
    let (mut a, mut b, mut shared) = (p1.hops.iter().peekable(), p2.hops.iter().peekable(), 0);
    while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
        match x.channel.cmp(&y.channel) {
            std::cmp::Ordering::Less => {
                a.next();
            }
            std::cmp::Ordering::Greater => {
                b.next();
            }
            std::cmp::Ordering::Equal => {
                if x.slot == y.slot {
                    shared += 1;
                }
                a.next();
                b.next();
            }
        }
    }
    Ok(shared)
}

fn write_grid(f: &mut fmt::Formatter<'_>, grid: &Grid) -> fmt::Result {
    for r in 0..grid.rows {
        let line: Vec<String> = grid.row(r).iter().map(Symbol::to_string).collect();
        writeln!(f, "{}", line.join(" "))?;
    }
    Ok(())
}

fn write_block(out: &mut String, alphabet: usize, grid: &Grid, index: usize) {
    let _ = writeln!(out, "{} {} {} {}", alphabet, grid.rows, grid.cols, index);
    for r in 0..grid.rows {
        let line: Vec<String> = grid.row(r).iter().map(Symbol::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

struct Block {
    line: usize,
    header: (usize, usize, usize, usize),
    rows: Vec<Vec<Symbol>>,
}

fn parse_blocks(text: &str) -> Result<Vec<Block>, LatinError> {
    let parse_err = |line: usize, message: String| LatinError::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let mut blocks = Vec::new();
    while let Some((line, header)) = lines.next() {
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(line, format!("bad header token {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [q, rows, cols, index] = nums[..] else {
            return Err(parse_err(line, "header must be `q rows cols index`".into()));
        };
        let mut grid = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (row_line, text) = lines.next().ok_or_else(|| parse_err(line, "truncated block".into()))?;
            let row: Vec<Symbol> = text
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(row_line, format!("bad symbol {t:?}"))))
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(parse_err(row_line, format!("expected {cols} symbols, found {}", row.len())));
            }
            grid.push(row);
        }
        blocks.push(Block { line, header: (q, rows, cols, index), rows: grid });
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The three order-4 squares of the worked example, shifted to 0-based symbols.
    fn shifted_squares() -> (LatinSquare, LatinSquare, LatinSquare) {
        let e = LatinSquare::from_fn(4, |i, j| ((i + j) % 4) as Symbol).unwrap();
        let f = LatinSquare::from_fn(4, |i, j| ((i + j + 3) % 4) as Symbol).unwrap();
        let j = LatinSquare::from_fn(4, |i, j| ((i + j + 2) % 4) as Symbol).unwrap();
        (e, f, j)
    }

    #[test]
    fn example_squares_are_row_shifts() {
        let (e, f, j) = shifted_squares();
        let one_based = |s: &LatinSquare| -> Vec<Vec<u32>> { s.to_rows().into_iter().map(|r| r.into_iter().map(|x| x + 1).collect()).collect() };
        assert_eq!(one_based(&e), vec![vec![1, 2, 3, 4], vec![2, 3, 4, 1], vec![3, 4, 1, 2], vec![4, 1, 2, 3]]);
        assert_eq!(one_based(&f), vec![vec![4, 1, 2, 3], vec![1, 2, 3, 4], vec![2, 3, 4, 1], vec![3, 4, 1, 2]]);
        assert_eq!(one_based(&j), vec![vec![3, 4, 1, 2], vec![4, 1, 2, 3], vec![1, 2, 3, 4], vec![2, 3, 4, 1]]);
    }

    #[test]
    fn example_squares_are_cyclic_shifts_and_not_orthogonal() {
        // E⋈F repeats (2,1) at (0,1) and (1,0): all three are shifts of one square.
        let (e, f, j) = shifted_squares();
        assert_eq!((e.get(0, 1), f.get(0, 1)), (e.get(1, 0), f.get(1, 0)));
        assert!(!are_orthogonal(&e, &f).unwrap());
        assert!(!are_orthogonal(&e, &j).unwrap());
        assert!(!are_orthogonal(&f, &j).unwrap());
    }

    #[test]
    fn square_never_orthogonal_to_itself() {
        for q in [2, 3, 5, 7] {
            for s in generate_mols(q).unwrap().squares() {
                assert!(!are_orthogonal(s, s).unwrap());
            }
        }
    }

    #[test]
    fn orthogonality_requires_equal_order() {
        let a = generate_mols(3).unwrap().squares()[0].clone();
        let b = generate_mols(5).unwrap().squares()[0].clone();
        assert_eq!(are_orthogonal(&a, &b), Err(LatinError::OrderMismatch { left: 3, right: 5 }));
    }

    #[test]
    fn order_two_family() {
        let fam = generate_mols(2).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.squares()[0].to_rows(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn non_prime_orders_rejected_with_suggestion() {
        assert_eq!(generate_mols(4), Err(LatinError::NotPrime { order: 4, suggestion: 5 }));
        assert_eq!(generate_mols(1), Err(LatinError::NotPrime { order: 1, suggestion: 2 }));
        assert_eq!(generate_mols(0), Err(LatinError::NotPrime { order: 0, suggestion: 2 }));
        assert_eq!(generate_mols(12), Err(LatinError::NotPrime { order: 12, suggestion: 13 }));
        let msg = generate_mols(16).unwrap_err().to_string();
        assert!(msg.contains("17"), "{msg}");
    }

    #[test]
    fn order_five_family_pairwise_orthogonal() {
        let fam = generate_mols(5).unwrap();
        assert_eq!(fam.len(), 4);
        // brute force over all 25 superimposed cells
        for a in 0..4 {
            for b in a + 1..4 {
                let (sa, sb) = (&fam.squares()[a], &fam.squares()[b]);
                let mut pairs = std::collections::HashSet::new();
                for i in 0..5 {
                    for j in 0..5 {
                        pairs.insert((sa.get(i, j), sb.get(i, j)));
                    }
                }
                assert_eq!(pairs.len(), 25);
                assert!(are_orthogonal(sa, sb).unwrap());
            }
        }
    }

    #[test]
    fn invalid_squares_rejected() {
        assert!(matches!(LatinSquare::new(vec![vec![0, 1], vec![0, 1]]), Err(LatinError::RepeatedInColumn { .. })));
        assert!(matches!(LatinSquare::new(vec![vec![0, 0], vec![1, 1]]), Err(LatinError::RepeatedInRow { .. })));
        assert!(matches!(LatinSquare::new(vec![vec![0, 2], vec![2, 0]]), Err(LatinError::SymbolOutOfRange { .. })));
        assert!(matches!(LatinSquare::new(vec![vec![0, 1], vec![1]]), Err(LatinError::Ragged { .. })));
        assert_eq!(LatinSquare::new(vec![]), Err(LatinError::Empty));
    }

    #[test]
    fn family_rejects_non_orthogonal_and_oversized() {
        let (e, f, _) = shifted_squares();
        assert_eq!(OrthogonalFamily::new(vec![e.clone(), f]), Err(LatinError::NotOrthogonal { first: 0, second: 1 }));
        let mut squares = generate_mols(3).unwrap().squares().to_vec();
        squares.push(squares[0].clone());
        assert!(matches!(OrthogonalFamily::new(squares), Err(LatinError::FamilyTooLarge { .. })));
    }

    #[test]
    fn cuts() {
        let (e, _, _) = shifted_squares();
        assert_eq!(cut_rectangle(&e, 4, 4).unwrap().to_rows(), e.to_rows());
        let top = cut_rectangle(&e, 2, 4).unwrap();
        let one_based: Vec<Vec<u32>> = top.to_rows().into_iter().map(|r| r.into_iter().map(|x| x + 1).collect()).collect();
        assert_eq!(one_based, vec![vec![1, 2, 3, 4], vec![2, 3, 4, 1]]);
        assert_eq!(cut_rectangle(&e, 5, 4), Err(LatinError::CutTooLarge { rows: 5, cols: 4, order: 4 }));
        assert_eq!(cut_rectangle(&e, 4, 5), Err(LatinError::CutTooLarge { rows: 4, cols: 5, order: 4 }));
    }

    #[test]
    fn table_sized_cut_has_distinct_columns() {
        let fam = generate_mols(17).unwrap();
        let r = fam.rectangle(0, 16, 12).unwrap();
        assert_eq!((r.channels(), r.slots(), r.alphabet_size()), (16, 12, 17));
        for c in 0..12 {
            let col: std::collections::HashSet<_> = (0..16).map(|i| r.get(i, c)).collect();
            assert_eq!(col.len(), 16);
        }
        // re-validating through the checked constructor must succeed
        LatinRectangle::new(17, r.to_rows(), 0).unwrap();
    }

    #[test]
    fn pattern_of_symbol_b_in_e() {
        let (e, _, _) = shifted_squares();
        let rect = cut_rectangle(&e, 4, 4).unwrap();
        let p = pattern_of(&rect, 1).unwrap();
        let one_based: Vec<(usize, usize)> = p.hops().iter().map(|h| (h.channel + 1, h.slot + 1)).collect();
        assert_eq!(one_based, vec![(1, 2), (2, 1), (3, 4), (4, 3)]);
    }

    #[test]
    fn pattern_in_single_cell_rectangle() {
        let r = LatinRectangle::new(3, vec![vec![0]], 0).unwrap();
        assert_eq!(r.pattern(0).unwrap().hops(), &[Hop { channel: 0, slot: 0 }]);
        assert!(r.pattern(1).unwrap().is_empty());
        assert!(r.pattern(2).unwrap().is_empty());
        assert_eq!(r.pattern(3), Err(LatinError::NoSuchSymbol { symbol: 3, alphabet: 3 }));
    }

    #[test]
    fn pattern_matches_full_grid_scan() {
        let fam = generate_mols(17).unwrap();
        // square a = 3 lives at index 2
        let r = fam.rectangle(2, 16, 12).unwrap();
        let mut expected = Vec::new();
        for i in 0..16 {
            for j in 0..12 {
                if (3 * i + j) % 17 == 0 {
                    expected.push(Hop { channel: i, slot: j });
                }
            }
        }
        assert_eq!(r.pattern(0).unwrap().hops(), expected.as_slice());
    }

    #[test]
    fn worked_example_patterns_do_not_overlap() {
        let (e, f, j) = shifted_squares();
        let pu = cut_rectangle(&e, 4, 4).unwrap().pattern(1).unwrap();
        let pv = cut_rectangle(&f, 4, 4).unwrap().pattern(2).unwrap();
        let pw = cut_rectangle(&j, 4, 4).unwrap().pattern(0).unwrap();
        assert_eq!(overlap_count(&pu, &pv).unwrap(), 0);
        assert_eq!(overlap_count(&pu, &pw).unwrap(), 0);
        assert_eq!(overlap_count(&pv, &pw).unwrap(), 0);
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let fam = generate_mols(5).unwrap();
        let a = fam.rectangle(0, 5, 5).unwrap().pattern(0).unwrap();
        let b = fam.rectangle(0, 4, 5).unwrap().pattern(0).unwrap();
        assert!(matches!(overlap_count(&a, &b), Err(LatinError::DimensionMismatch { .. })));
    }

    #[test]
    fn overlaps_within_order_seven_family() {
        let fam = generate_mols(7).unwrap();
        for (rows, cols) in [(7, 7), (5, 7), (7, 4), (3, 3)] {
            let rects = fam.rectangles(rows, cols).unwrap();
            let patterns: Vec<Vec<TransmissionPattern>> = rects.iter().map(LatinRectangle::patterns).collect();
            for (ra, pa) in patterns.iter().enumerate() {
                for (rb, pb) in patterns.iter().enumerate() {
                    for (sa, x) in pa.iter().enumerate() {
                        for (sb, y) in pb.iter().enumerate() {
                            let n = overlap_count(x, y).unwrap();
                            if ra == rb && sa != sb {
                                assert_eq!(n, 0);
                            } else if ra != rb {
                                assert!(n <= 1, "{rows}x{cols} rect {ra}/{rb} symbols {sa}/{sb}: {n}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let fam = generate_mols(5).unwrap();
        let text = fam.to_text();
        assert!(text.starts_with("5 5 5 0\n0 1 2 3 4\n"));
        let back = OrthogonalFamily::from_text(&text).unwrap();
        assert_eq!(back, fam);
        assert_eq!(back.to_text(), text);

        let r = fam.rectangle(3, 2, 4).unwrap();
        let text = r.to_text();
        assert_eq!(text, "5 2 4 3\n0 1 2 3\n4 0 1 2\n");
        assert_eq!(LatinRectangle::from_text(&text).unwrap(), r);
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!(LatinRectangle::from_text("5 2 4\n"), Err(LatinError::Parse { line: 1, .. })));
        assert!(matches!(LatinRectangle::from_text("5 2 4 0\n0 1 2 3\n"), Err(LatinError::Parse { .. })));
        assert!(matches!(LatinRectangle::from_text("5 1 4 0\n0 1 2\n"), Err(LatinError::Parse { line: 2, .. })));
        assert!(matches!(LatinRectangle::from_text("5 1 2 0\n0 0\n"), Err(LatinError::RepeatedInRow { .. })));
    }
}
