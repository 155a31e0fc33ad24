//! Grid maps in the movingai text format.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A cell on a grid map. `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
}

impl Vertex {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// True when the two cells share an edge in the 4-connected grid.
    pub fn is_adjacent(self, other: Vertex) -> bool {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) == 1
    }

    pub fn manhattan(self, other: Vertex) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("malformed header at line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("map declares {expected} rows but has {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row} has {found} cells, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown cell character {ch:?} at ({x},{y})")]
    UnknownCell { ch: char, x: usize, y: usize },
    #[error("map dimensions must be positive (got {width}x{height})")]
    EmptyMap { width: usize, height: usize },
}

/// A rectangular 4-connected grid with per-cell traversability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    width: u32,
    height: u32,
    cells: Vec<bool>,
}

impl GridMap {
    /// An obstacle-free map.
    pub fn open(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0, "map dimensions must be positive");
        Self {
            width,
            height,
            cells: vec![true; (width * height) as usize],
        }
    }

    /// Builds a map from a row-major traversability vector.
    pub fn from_cells(width: u32, height: u32, cells: Vec<bool>) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::EmptyMap {
                width: width as usize,
                height: height as usize,
            });
        }
        if cells.len() != (width as usize) * (height as usize) {
            return Err(MapError::RowCount {
                expected: (width * height) as usize,
                found: cells.len(),
            });
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x < self.width && v.y < self.height
    }

    /// Out-of-bounds cells are reported as blocked.
    pub fn is_traversable(&self, v: Vertex) -> bool {
        self.contains(v) && self.cells[self.index(v)]
    }

    /// Row-major linear index. Caller guarantees `v` is in bounds.
    pub fn index(&self, v: Vertex) -> usize {
        (v.y * self.width + v.x) as usize
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        Vertex::new(index as u32 % self.width, index as u32 / self.width)
    }

    pub fn free_cells(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Traversable 4-neighbours of `v`, in the order east, west, south, north.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let candidates = [
            (v.x.checked_add(1), Some(v.y)),
            (v.x.checked_sub(1), Some(v.y)),
            (Some(v.x), v.y.checked_add(1)),
            (Some(v.x), v.y.checked_sub(1)),
        ];
        candidates.into_iter().filter_map(move |c| match c {
            (Some(x), Some(y)) => {
                let n = Vertex::new(x, y);
                self.is_traversable(n).then_some(n)
            }
            _ => None,
        })
    }

    /// Parses the movingai `.map` format.
    ///
    /// `.` and `G` are traversable; `@`, `T` and `O` are blocked. Any other
    /// character is rejected.
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut lines = text.lines().enumerate();
        let mut height = None;
        let mut width = None;
        let mut saw_type = false;

        loop {
            let Some((no, raw)) = lines.next() else {
                return Err(MapError::MalformedHeader {
                    line: 0,
                    reason: "missing `map` line".into(),
                });
            };
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let value = parts.next();
            let header_err = |reason: &str| MapError::MalformedHeader {
                line: no + 1,
                reason: reason.to_string(),
            };
            match key {
                "type" => {
                    value.ok_or_else(|| header_err("`type` without a value"))?;
                    saw_type = true;
                }
                "height" | "width" => {
                    let n: usize = value
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| header_err("dimension is not a number"))?;
                    if key == "height" {
                        height = Some(n);
                    } else {
                        width = Some(n);
                    }
                }
                "map" => break,
                other => return Err(header_err(&format!("unexpected header key `{other}`"))),
            }
        }

        if !saw_type {
            return Err(MapError::MalformedHeader {
                line: 1,
                reason: "missing `type` line".into(),
            });
        }
        let (Some(height), Some(width)) = (height, width) else {
            return Err(MapError::MalformedHeader {
                line: 1,
                reason: "missing `height` or `width`".into(),
            });
        };
        if height == 0 || width == 0 {
            return Err(MapError::EmptyMap { width, height });
        }

        let rows: Vec<&str> = lines
            .map(|(_, l)| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .collect();
        if rows.len() != height {
            return Err(MapError::RowCount {
                expected: height,
                found: rows.len(),
            });
        }

        let mut cells = Vec::with_capacity(width * height);
        for (y, row) in rows.iter().enumerate() {
            let count = row.chars().count();
            if count != width {
                return Err(MapError::RowWidth {
                    row: y,
                    expected: width,
                    found: count,
                });
            }
            for (x, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '.' | 'G' => true,
                    '@' | 'T' | 'O' => false,
                    ch => return Err(MapError::UnknownCell { ch, x, y }),
                });
            }
        }

        Ok(Self {
            width: width as u32,
            height: height as u32,
            cells,
        })
    }

    /// Serializes to the movingai format using `.` and `@`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for row in self.cells.chunks(self.width as usize) {
            out.extend(row.iter().map(|&free| if free { '.' } else { '@' }));
            out.push('\n');
        }
        out
    }
}
