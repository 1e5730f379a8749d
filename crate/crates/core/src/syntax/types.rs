//! Type descriptors.

use std::fmt;

pub type TypeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum TypeKind {
    Integer,
    Boolean,
    Real,
    /// `id` distinguishes enumeration declarations (name equivalence).
    Enumeration { id: usize, members: Vec<String> },
    Subrange { lo: i64, hi: i64 },
    Array { lo: i64, hi: i64, index: TypeId, elem: TypeId },
    Record { fields: Vec<Field> },
    List { elem: TypeId },
    Str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: TypeId,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDescriptor {
    pub kind: TypeKind,
    /// Only ever set on simple types.
    pub constrained: bool,
    /// Storage size in slots.
    pub size: usize,
    pub name: Option<String>,
}

/// Scalar classification used for compatibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalar {
    Int,
    Bool,
    Real,
    Enum(usize),
    Str,
}

#[derive(Debug, Clone)]
pub struct TypeTable {
    types: Vec<TypeDescriptor>,
}

pub const INTEGER: TypeId = 0;
pub const BOOLEAN: TypeId = 1;
pub const REAL: TypeId = 2;
pub const STRING: TypeId = 3;

impl Default for TypeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl TypeTable {
    pub fn new() -> Self {
        let simple = |kind, name: &str| TypeDescriptor {
            kind,
            constrained: false,
            size: 1,
            name: Some(name.to_string()),
        };
        TypeTable {
            types: vec![
                simple(TypeKind::Integer, "INTEGER"),
                simple(TypeKind::Boolean, "BOOLEAN"),
                simple(TypeKind::Real, "REAL"),
                simple(TypeKind::Str, "STRING"),
            ],
        }
    }

    pub fn add(&mut self, desc: TypeDescriptor) -> TypeId {
        self.types.push(desc);
        self.types.len() - 1
    }

    pub fn get(&self, id: TypeId) -> &TypeDescriptor {
        &self.types[id]
    }

    pub fn set_name(&mut self, id: TypeId, name: &str) {
        if self.types[id].name.is_none() {
            self.types[id].name = Some(name.to_string());
        }
    }

    pub fn kind(&self, id: TypeId) -> &TypeKind {
        &self.types[id].kind
    }

    pub fn size(&self, id: TypeId) -> usize {
        self.types[id].size
    }

    pub fn is_simple(&self, id: TypeId) -> bool {
        matches!(
            self.kind(id),
            TypeKind::Integer
                | TypeKind::Boolean
                | TypeKind::Real
                | TypeKind::Enumeration { .. }
                | TypeKind::Subrange { .. }
        )
    }

    pub fn is_constrained(&self, id: TypeId) -> bool {
        self.types[id].constrained
    }

    /// Whether any storage slot of `id` is an unknown.
    pub fn contains_unknowns(&self, id: TypeId) -> bool {
        match self.kind(id) {
            TypeKind::Array { elem, .. } => self.contains_unknowns(*elem),
            TypeKind::Record { fields } => fields.iter().any(|f| self.contains_unknowns(f.ty)),
            _ => self.is_constrained(id),
        }
    }

    pub fn contains_lists(&self, id: TypeId) -> bool {
        match self.kind(id) {
            TypeKind::Array { elem, .. } => self.contains_lists(*elem),
            TypeKind::Record { fields } => fields.iter().any(|f| self.contains_lists(f.ty)),
            TypeKind::List { .. } => true,
            _ => false,
        }
    }

    /// Returns the constrained variant of a simple type, creating it if needed.
    pub fn constrained_of(&mut self, id: TypeId) -> TypeId {
        if self.is_constrained(id) {
            return id;
        }
        let mut desc = self.types[id].clone();
        desc.constrained = true;
        if let Some(pos) = self.types.iter().position(|t| *t == desc) {
            return pos;
        }
        self.add(desc)
    }

    /// The plain (non-constrained) variant of a simple type.
    pub fn unconstrained_of(&mut self, id: TypeId) -> TypeId {
        if !self.is_constrained(id) {
            return id;
        }
        let mut desc = self.types[id].clone();
        desc.constrained = false;
        if let Some(pos) = self.types.iter().position(|t| *t == desc) {
            return pos;
        }
        self.add(desc)
    }

    pub fn scalar(&self, id: TypeId) -> Option<Scalar> {
        match self.kind(id) {
            TypeKind::Integer | TypeKind::Subrange { .. } => Some(Scalar::Int),
            TypeKind::Boolean => Some(Scalar::Bool),
            TypeKind::Real => Some(Scalar::Real),
            TypeKind::Enumeration { id, .. } => Some(Scalar::Enum(*id)),
            TypeKind::Str => Some(Scalar::Str),
            _ => None,
        }
    }

    /// Finite value range of an ordinal type, as ordinals.
    pub fn ordinal_range(&self, id: TypeId) -> Option<(i64, i64)> {
        match self.kind(id) {
            TypeKind::Boolean => Some((0, 1)),
            TypeKind::Enumeration { members, .. } => Some((0, members.len() as i64 - 1)),
            TypeKind::Subrange { lo, hi } => Some((*lo, *hi)),
            _ => None,
        }
    }

    /// Structural equivalence. Constrained qualifiers must match when
    /// `exact` is set.
    pub fn equivalent(&self, a: TypeId, b: TypeId, exact: bool) -> bool {
        if a == b {
            return true;
        }
        if exact && self.is_constrained(a) != self.is_constrained(b) {
            return false;
        }
        if exact
            && self.is_simple(a)
            && std::mem::discriminant(self.kind(a)) != std::mem::discriminant(self.kind(b))
        {
            return false;
        }
        match (self.kind(a), self.kind(b)) {
            (
                TypeKind::Array { lo: l1, hi: h1, elem: e1, .. },
                TypeKind::Array { lo: l2, hi: h2, elem: e2, .. },
            ) => l1 == l2 && h1 == h2 && self.equivalent(*e1, *e2, exact),
            (TypeKind::Record { fields: f1 }, TypeKind::Record { fields: f2 }) => {
                f1.len() == f2.len()
                    && f1
                        .iter()
                        .zip(f2)
                        .all(|(x, y)| x.name == y.name && self.equivalent(x.ty, y.ty, exact))
            }
            (TypeKind::List { elem: e1 }, TypeKind::List { elem: e2 }) => {
                self.scalar(*e1) == self.scalar(*e2)
            }
            (TypeKind::Subrange { lo: l1, hi: h1 }, TypeKind::Subrange { lo: l2, hi: h2 }) if exact => {
                l1 == l2 && h1 == h2
            }
            _ => match (self.scalar(a), self.scalar(b)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
        }
    }

    pub fn display(&self, id: TypeId) -> TypeDisplay<'_> {
        TypeDisplay { table: self, id }
    }
}

pub struct TypeDisplay<'a> {
    table: &'a TypeTable,
    id: TypeId,
}

impl fmt::Display for TypeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let desc = self.table.get(self.id);
        if let Some(name) = &desc.name {
            return write!(f, "{name}");
        }
        match &desc.kind {
            TypeKind::Integer => write!(f, "INTEGER"),
            TypeKind::Boolean => write!(f, "BOOLEAN"),
            TypeKind::Real => write!(f, "REAL"),
            TypeKind::Str => write!(f, "STRING"),
            TypeKind::Enumeration { members, .. } => write!(f, "({})", members.join(", ")),
            TypeKind::Subrange { lo, hi } => write!(f, "[{lo}..{hi}]"),
            TypeKind::Array { lo, hi, elem, .. } => {
                write!(f, "ARRAY [{lo}..{hi}] OF {}", self.table.display(*elem))
            }
            TypeKind::Record { fields } => {
                write!(f, "RECORD")?;
                for fl in fields {
                    write!(f, " {}: {};", fl.name, self.table.display(fl.ty))?;
                }
                write!(f, " END")
            }
            TypeKind::List { elem } => write!(f, "LIST OF {}", self.table.display(*elem)),
        }
    }
}
