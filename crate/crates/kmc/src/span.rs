use std::fmt;

/// Location of a token or syntax node in model source text.
///
/// Lines and columns are 1-based; `len` is the number of characters covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl SourceSpan {
    pub fn new(line: u32, col: u32, len: u32) -> Self {
        SourceSpan { line, col, len }
    }

    /// Span for nodes built programmatically rather than parsed.
    pub fn synthetic() -> Self {
        SourceSpan { line: 1, col: 1, len: 0 }
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        SourceSpan::synthetic()
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}", self.line, self.col)
    }
}
