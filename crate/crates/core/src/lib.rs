pub mod filter;
pub mod glyph;
pub mod layout;
pub mod model;
pub mod serializer;
pub mod token;
pub mod view;

pub use model::{
    validate_graph, Accessibility, Diagnostic, DocComment, DocSpan, Entity, EntityGraph, EntityKind,
    MethodKind, RelationId, Scalar, Severity, SourceLocation, TypeKind, ValidationReport, Violation,
};
pub use token::{assign_tokens, is_ancestor, parse_token, render_token, Token};
