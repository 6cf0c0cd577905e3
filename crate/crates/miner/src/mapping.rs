//! How Rust constructs map onto entity kinds.

use codecarta_core::{Accessibility, EntityKind, MethodKind, TypeKind};

/// Every declaration shape the miner can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Construct {
    Workspace,
    Package,
    ExternalDependency,
    Module,
    Struct,
    CopyStruct,
    Union,
    Enum,
    Trait,
    FnTypeAlias,
    FreeFunction,
    AssociatedFunction,
    Constructor,
    Method,
    OperatorMethod,
    DropMethod,
    NamedField,
    TupleField,
    EnumVariant,
    Const,
    Static,
    AssociatedConst,
    AssociatedType,
    AccessorPair,
    TypeAlias,
    MacroRules,
    TraitAlias,
    ForeignType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    pub kind: EntityKind,
    pub type_kind: Option<TypeKind>,
    pub method_kind: Option<MethodKind>,
    pub is_static: bool,
    /// Set when the construct has no natural counterpart and took the fallback row.
    pub unmapped: Option<&'static str>,
}

impl Construct {
    pub const ALL: [Construct; 28] = [
        Construct::Workspace,
        Construct::Package,
        Construct::ExternalDependency,
        Construct::Module,
        Construct::Struct,
        Construct::CopyStruct,
        Construct::Union,
        Construct::Enum,
        Construct::Trait,
        Construct::FnTypeAlias,
        Construct::FreeFunction,
        Construct::AssociatedFunction,
        Construct::Constructor,
        Construct::Method,
        Construct::OperatorMethod,
        Construct::DropMethod,
        Construct::NamedField,
        Construct::TupleField,
        Construct::EnumVariant,
        Construct::Const,
        Construct::Static,
        Construct::AssociatedConst,
        Construct::AssociatedType,
        Construct::AccessorPair,
        Construct::TypeAlias,
        Construct::MacroRules,
        Construct::TraitAlias,
        Construct::ForeignType,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Construct::Workspace => "workspace",
            Construct::Package => "package",
            Construct::ExternalDependency => "external dependency",
            Construct::Module => "module",
            Construct::Struct => "struct",
            Construct::CopyStruct => "Copy struct",
            Construct::Union => "union",
            Construct::Enum => "enum",
            Construct::Trait => "trait",
            Construct::FnTypeAlias => "function type alias",
            Construct::FreeFunction => "free function",
            Construct::AssociatedFunction => "associated function",
            Construct::Constructor => "constructor function",
            Construct::Method => "method",
            Construct::OperatorMethod => "operator trait method",
            Construct::DropMethod => "Drop::drop",
            Construct::NamedField => "named field",
            Construct::TupleField => "tuple field",
            Construct::EnumVariant => "enum variant",
            Construct::Const => "const item",
            Construct::Static => "static item",
            Construct::AssociatedConst => "associated const",
            Construct::AssociatedType => "associated type",
            Construct::AccessorPair => "accessor pair",
            Construct::TypeAlias => "type alias",
            Construct::MacroRules => "macro_rules",
            Construct::TraitAlias => "trait alias",
            Construct::ForeignType => "foreign type",
        }
    }
}

pub fn map_construct(c: Construct) -> Mapping {
    use Construct::*;
    let plain = |kind| Mapping { kind, type_kind: None, method_kind: None, is_static: false, unmapped: None };
    let ty = |tk| Mapping { type_kind: Some(tk), ..plain(EntityKind::Type) };
    let method = |mk, is_static| Mapping { method_kind: Some(mk), is_static, ..plain(EntityKind::Method) };
    let field = |is_static| Mapping { is_static, ..plain(EntityKind::Field) };
    match c {
        Workspace => plain(EntityKind::Solution),
        Package => plain(EntityKind::Project),
        ExternalDependency => plain(EntityKind::Package),
        Module => plain(EntityKind::Namespace),
        Struct => ty(TypeKind::Class),
        CopyStruct | Union => ty(TypeKind::Struct),
        Enum => ty(TypeKind::Enum),
        Trait => ty(TypeKind::Interface),
        FnTypeAlias => ty(TypeKind::Delegate),
        FreeFunction | AssociatedFunction => method(MethodKind::Ordinary, true),
        Constructor => method(MethodKind::Constructor, true),
        Method => method(MethodKind::Ordinary, false),
        OperatorMethod => method(MethodKind::Operator, false),
        DropMethod => method(MethodKind::Other("finalizer".into()), false),
        NamedField | TupleField => field(false),
        EnumVariant | Const | Static | AssociatedConst | AssociatedType => field(true),
        AccessorPair => plain(EntityKind::Property),
        TypeAlias | MacroRules | TraitAlias | ForeignType => Mapping { unmapped: Some(c.label()), ..ty(TypeKind::Class) },
    }
}

/// `pub` is Public, `pub(crate)` Internal, `pub(super)` Protected,
/// `pub(in path)` ProtectedInternal, anything else Private.
pub fn accessibility(vis: &syn::Visibility) -> Accessibility {
    match vis {
        syn::Visibility::Public(_) => Accessibility::Public,
        syn::Visibility::Restricted(r) => {
            if r.in_token.is_some() {
                Accessibility::ProtectedInternal
            } else if r.path.is_ident("crate") {
                Accessibility::Internal
            } else if r.path.is_ident("super") {
                Accessibility::Protected
            } else {
                Accessibility::Private
            }
        }
        syn::Visibility::Inherited => Accessibility::Private,
    }
}

/// Traits from `std::ops` whose methods are operators.
pub const OPERATOR_TRAITS: &[&str] = &[
    "Add", "Sub", "Mul", "Div", "Rem", "Neg", "Not", "BitAnd", "BitOr", "BitXor", "Shl", "Shr", "AddAssign",
    "SubAssign", "MulAssign", "DivAssign", "RemAssign", "BitAndAssign", "BitOrAssign", "BitXorAssign", "ShlAssign",
    "ShrAssign", "Index", "IndexMut", "Deref", "DerefMut", "PartialEq", "PartialOrd",
];
