"""Universal node taxonomy and the per-language native-kind mapping tables.

The taxonomy is a closed set of 47 categories (codes 0..46). Native grammar
kinds not present in any table fall back to UNKNOWN; grammar error-recovery
nodes (native kind "ERROR") always map to UNKNOWN.
"""

from __future__ import annotations

import enum
import keyword

from .types import Language


class UniversalCategory(enum.IntEnum):
    UNKNOWN = 0
    SOURCE_ROOT = 1
    FUNCTION_DECLARATION = 2
    CLASS_DECLARATION = 3
    INTERFACE_DECLARATION = 4
    ENUM_DECLARATION = 5
    NAMESPACE_DECLARATION = 6
    VARIABLE_DECLARATION = 7
    VARIABLE_ASSIGNMENT = 8
    AUGMENTED_ASSIGNMENT = 9
    PARAMETER_LIST = 10
    PARAMETER = 11
    TYPE_REFERENCE = 12
    BLOCK = 13
    CONDITIONAL = 14
    LOOP = 15
    CONTROL_FLOW = 16
    RETURN_STATEMENT = 17
    CALL = 18
    OBJECT_CREATION = 19
    MEMBER_ACCESS = 20
    SUBSCRIPT = 21
    IDENTIFIER = 22
    STRING_LITERAL = 23
    NUMBER_LITERAL = 24
    BOOLEAN_LITERAL = 25
    NULL_LITERAL = 26
    COLLECTION_LITERAL = 27
    BINARY_EXPRESSION = 28
    UNARY_EXPRESSION = 29
    COMPARISON = 30
    LOGICAL_EXPRESSION = 31
    TERNARY_EXPRESSION = 32
    LAMBDA = 33
    IMPORT = 34
    PREPROCESSOR = 35
    EXCEPTION_HANDLING = 36
    THROW_STATEMENT = 37
    RESOURCE_MANAGEMENT = 38
    ASSERTION = 39
    EXPRESSION_STATEMENT = 40
    COMMENT = 41
    DECORATOR = 42
    OPERATOR = 43
    ARGUMENT_LIST = 44
    KEYWORD = 45
    PUNCTUATION = 46


CATEGORY_COUNT = 47

_C = UniversalCategory

# Leaf tokens shared by every grammar: operator symbols vs. structural punctuation.
_OPERATOR_TOKENS = {
    "+", "-", "*", "/", "%", "**", "//", "@", "=", "+=", "-=", "*=", "/=", "%=",
    "**=", "//=", "@=", "&", "|", "^", "~", "<<", ">>", ">>>", "&=", "|=", "^=",
    "<<=", ">>=", ">>>=", "==", "!=", "<", ">", "<=", ">=", "<=>", "&&", "||",
    "!", "++", "--", ":=", "->*", "?",
}

_PUNCT_TOKENS = {
    "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "::", "->", "...", "#",
    "\\", "`", "$",
}

_PY_KEYWORDS = frozenset(keyword.kwlist) | {"match", "case"}

_JAVA_KEYWORDS = frozenset({
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "record", "return", "short",
    "static", "strictfp", "super", "switch", "synchronized", "this", "throw",
    "throws", "transient", "try", "var", "void", "volatile", "while", "yield",
})

_CPP_KEYWORDS = frozenset({
    "alignas", "alignof", "asm", "auto", "bool", "break", "case", "catch",
    "char", "class", "const", "consteval", "constexpr", "constinit",
    "const_cast", "continue", "decltype", "default", "delete", "do", "double",
    "dynamic_cast", "else", "enum", "explicit", "export", "extern", "final",
    "float", "for", "friend", "goto", "if", "inline", "int", "long", "mutable",
    "namespace", "new", "noexcept", "operator", "override", "private",
    "protected", "public", "register", "reinterpret_cast", "return", "short",
    "signed", "sizeof", "static", "static_assert", "static_cast", "struct",
    "switch", "template", "this", "throw", "try", "typedef", "typeid",
    "typename", "union", "unsigned", "using", "virtual", "void", "volatile",
    "wchar_t", "while",
})

KEYWORDS = {
    Language.PYTHON: _PY_KEYWORDS,
    Language.JAVA: _JAVA_KEYWORDS,
    Language.CPP: _CPP_KEYWORDS,
}

_PYTHON_KINDS = {
    "module": _C.SOURCE_ROOT,
    "function_definition": _C.FUNCTION_DECLARATION,
    "class_definition": _C.CLASS_DECLARATION,
    "parameters": _C.PARAMETER_LIST,
    "parameter": _C.PARAMETER,
    "type": _C.TYPE_REFERENCE,
    "block": _C.BLOCK,
    "if_statement": _C.CONDITIONAL,
    "elif_clause": _C.CONDITIONAL,
    "else_clause": _C.CONDITIONAL,
    "match_statement": _C.CONDITIONAL,
    "while_statement": _C.LOOP,
    "for_statement": _C.LOOP,
    "try_statement": _C.EXCEPTION_HANDLING,
    "except_clause": _C.EXCEPTION_HANDLING,
    "finally_clause": _C.EXCEPTION_HANDLING,
    "with_statement": _C.RESOURCE_MANAGEMENT,
    "import_statement": _C.IMPORT,
    "import_from_statement": _C.IMPORT,
    "aliased_import": _C.IMPORT,
    "dotted_name": _C.MEMBER_ACCESS,
    "return_statement": _C.RETURN_STATEMENT,
    "raise_statement": _C.THROW_STATEMENT,
    "assert_statement": _C.ASSERTION,
    "pass_statement": _C.CONTROL_FLOW,
    "break_statement": _C.CONTROL_FLOW,
    "continue_statement": _C.CONTROL_FLOW,
    "global_statement": _C.VARIABLE_DECLARATION,
    "nonlocal_statement": _C.VARIABLE_DECLARATION,
    "del_statement": _C.CONTROL_FLOW,
    "expression_statement": _C.EXPRESSION_STATEMENT,
    "assignment": _C.VARIABLE_ASSIGNMENT,
    "augmented_assignment": _C.AUGMENTED_ASSIGNMENT,
    "named_expression": _C.VARIABLE_ASSIGNMENT,
    "call": _C.CALL,
    "argument_list": _C.ARGUMENT_LIST,
    "keyword_argument": _C.ARGUMENT_LIST,
    "attribute": _C.MEMBER_ACCESS,
    "subscript": _C.SUBSCRIPT,
    "slice": _C.SUBSCRIPT,
    "identifier": _C.IDENTIFIER,
    "string": _C.STRING_LITERAL,
    "concatenated_string": _C.STRING_LITERAL,
    "integer": _C.NUMBER_LITERAL,
    "float": _C.NUMBER_LITERAL,
    "true": _C.BOOLEAN_LITERAL,
    "false": _C.BOOLEAN_LITERAL,
    "none": _C.NULL_LITERAL,
    "list": _C.COLLECTION_LITERAL,
    "dictionary": _C.COLLECTION_LITERAL,
    "set": _C.COLLECTION_LITERAL,
    "tuple": _C.COLLECTION_LITERAL,
    "pair": _C.COLLECTION_LITERAL,
    "list_comprehension": _C.COLLECTION_LITERAL,
    "dictionary_comprehension": _C.COLLECTION_LITERAL,
    "set_comprehension": _C.COLLECTION_LITERAL,
    "generator_expression": _C.COLLECTION_LITERAL,
    "binary_operator": _C.BINARY_EXPRESSION,
    "unary_operator": _C.UNARY_EXPRESSION,
    "not_operator": _C.LOGICAL_EXPRESSION,
    "boolean_operator": _C.LOGICAL_EXPRESSION,
    "comparison_operator": _C.COMPARISON,
    "conditional_expression": _C.TERNARY_EXPRESSION,
    "lambda": _C.LAMBDA,
    "lambda_parameters": _C.PARAMETER_LIST,
    "yield_expression": _C.CONTROL_FLOW,
    "await_expression": _C.UNARY_EXPRESSION,
    "splat_argument": _C.UNARY_EXPRESSION,
    "decorator": _C.DECORATOR,
    "comment": _C.COMMENT,
    "ERROR": _C.UNKNOWN,
}

_JAVA_KINDS = {
    "program": _C.SOURCE_ROOT,
    "package_declaration": _C.NAMESPACE_DECLARATION,
    "import_declaration": _C.IMPORT,
    "class_declaration": _C.CLASS_DECLARATION,
    "interface_declaration": _C.INTERFACE_DECLARATION,
    "enum_declaration": _C.ENUM_DECLARATION,
    "record_declaration": _C.CLASS_DECLARATION,
    "class_body": _C.BLOCK,
    "interface_body": _C.BLOCK,
    "enum_body": _C.BLOCK,
    "field_declaration": _C.VARIABLE_DECLARATION,
    "method_declaration": _C.FUNCTION_DECLARATION,
    "constructor_declaration": _C.FUNCTION_DECLARATION,
    "static_initializer": _C.BLOCK,
    "formal_parameters": _C.PARAMETER_LIST,
    "formal_parameter": _C.PARAMETER,
    "type_identifier": _C.TYPE_REFERENCE,
    "generic_type": _C.TYPE_REFERENCE,
    "array_type": _C.TYPE_REFERENCE,
    "integral_type": _C.TYPE_REFERENCE,
    "floating_point_type": _C.TYPE_REFERENCE,
    "boolean_type": _C.TYPE_REFERENCE,
    "void_type": _C.TYPE_REFERENCE,
    "type_parameters": _C.TYPE_REFERENCE,
    "annotation": _C.DECORATOR,
    "marker_annotation": _C.DECORATOR,
    "block": _C.BLOCK,
    "local_variable_declaration": _C.VARIABLE_DECLARATION,
    "if_statement": _C.CONDITIONAL,
    "switch_expression": _C.CONDITIONAL,
    "switch_label": _C.CONTROL_FLOW,
    "ternary_expression": _C.TERNARY_EXPRESSION,
    "while_statement": _C.LOOP,
    "do_statement": _C.LOOP,
    "for_statement": _C.LOOP,
    "enhanced_for_statement": _C.LOOP,
    "try_statement": _C.EXCEPTION_HANDLING,
    "try_with_resources_statement": _C.RESOURCE_MANAGEMENT,
    "resource_specification": _C.RESOURCE_MANAGEMENT,
    "catch_clause": _C.EXCEPTION_HANDLING,
    "finally_clause": _C.EXCEPTION_HANDLING,
    "throw_statement": _C.THROW_STATEMENT,
    "return_statement": _C.RETURN_STATEMENT,
    "break_statement": _C.CONTROL_FLOW,
    "continue_statement": _C.CONTROL_FLOW,
    "labeled_statement": _C.CONTROL_FLOW,
    "synchronized_statement": _C.CONTROL_FLOW,
    "assert_statement": _C.ASSERTION,
    "expression_statement": _C.EXPRESSION_STATEMENT,
    "assignment_expression": _C.VARIABLE_ASSIGNMENT,
    "augmented_assignment": _C.AUGMENTED_ASSIGNMENT,
    "update_expression": _C.AUGMENTED_ASSIGNMENT,
    "method_invocation": _C.CALL,
    "object_creation_expression": _C.OBJECT_CREATION,
    "field_access": _C.MEMBER_ACCESS,
    "method_reference": _C.MEMBER_ACCESS,
    "array_access": _C.SUBSCRIPT,
    "lambda_expression": _C.LAMBDA,
    "binary_expression": _C.BINARY_EXPRESSION,
    "comparison_expression": _C.COMPARISON,
    "logical_expression": _C.LOGICAL_EXPRESSION,
    "instanceof_expression": _C.COMPARISON,
    "unary_expression": _C.UNARY_EXPRESSION,
    "cast_expression": _C.UNARY_EXPRESSION,
    "argument_list": _C.ARGUMENT_LIST,
    "identifier": _C.IDENTIFIER,
    "string_literal": _C.STRING_LITERAL,
    "character_literal": _C.STRING_LITERAL,
    "decimal_integer_literal": _C.NUMBER_LITERAL,
    "decimal_floating_point_literal": _C.NUMBER_LITERAL,
    "true": _C.BOOLEAN_LITERAL,
    "false": _C.BOOLEAN_LITERAL,
    "null_literal": _C.NULL_LITERAL,
    "array_initializer": _C.COLLECTION_LITERAL,
    "array_creation_expression": _C.OBJECT_CREATION,
    "line_comment": _C.COMMENT,
    "block_comment": _C.COMMENT,
    "ERROR": _C.UNKNOWN,
}

_CPP_KINDS = {
    "translation_unit": _C.SOURCE_ROOT,
    "preproc_include": _C.IMPORT,
    "preproc_def": _C.PREPROCESSOR,
    "preproc_call": _C.PREPROCESSOR,
    "namespace_definition": _C.NAMESPACE_DECLARATION,
    "using_declaration": _C.IMPORT,
    "linkage_specification": _C.BLOCK,
    "class_specifier": _C.CLASS_DECLARATION,
    "struct_specifier": _C.CLASS_DECLARATION,
    "union_specifier": _C.CLASS_DECLARATION,
    "enum_specifier": _C.ENUM_DECLARATION,
    "template_parameter_list": _C.TYPE_REFERENCE,
    "access_specifier": _C.KEYWORD,
    "function_definition": _C.FUNCTION_DECLARATION,
    "declaration": _C.VARIABLE_DECLARATION,
    "field_declaration": _C.VARIABLE_DECLARATION,
    "typedef_declaration": _C.TYPE_REFERENCE,
    "parameter_list": _C.PARAMETER_LIST,
    "parameter_declaration": _C.PARAMETER,
    "type_identifier": _C.TYPE_REFERENCE,
    "primitive_type": _C.TYPE_REFERENCE,
    "compound_statement": _C.BLOCK,
    "if_statement": _C.CONDITIONAL,
    "switch_statement": _C.CONDITIONAL,
    "case_statement": _C.CONTROL_FLOW,
    "while_statement": _C.LOOP,
    "do_statement": _C.LOOP,
    "for_statement": _C.LOOP,
    "for_range_loop": _C.LOOP,
    "try_statement": _C.EXCEPTION_HANDLING,
    "catch_clause": _C.EXCEPTION_HANDLING,
    "throw_statement": _C.THROW_STATEMENT,
    "return_statement": _C.RETURN_STATEMENT,
    "break_statement": _C.CONTROL_FLOW,
    "continue_statement": _C.CONTROL_FLOW,
    "goto_statement": _C.CONTROL_FLOW,
    "labeled_statement": _C.CONTROL_FLOW,
    "expression_statement": _C.EXPRESSION_STATEMENT,
    "assignment_expression": _C.VARIABLE_ASSIGNMENT,
    "augmented_assignment": _C.AUGMENTED_ASSIGNMENT,
    "update_expression": _C.AUGMENTED_ASSIGNMENT,
    "call_expression": _C.CALL,
    "new_expression": _C.OBJECT_CREATION,
    "delete_expression": _C.UNARY_EXPRESSION,
    "field_expression": _C.MEMBER_ACCESS,
    "qualified_identifier": _C.MEMBER_ACCESS,
    "subscript_expression": _C.SUBSCRIPT,
    "binary_expression": _C.BINARY_EXPRESSION,
    "comparison_expression": _C.COMPARISON,
    "logical_expression": _C.LOGICAL_EXPRESSION,
    "conditional_expression": _C.TERNARY_EXPRESSION,
    "unary_expression": _C.UNARY_EXPRESSION,
    "pointer_expression": _C.UNARY_EXPRESSION,
    "cast_expression": _C.UNARY_EXPRESSION,
    "sizeof_expression": _C.UNARY_EXPRESSION,
    "lambda_expression": _C.LAMBDA,
    "initializer_list": _C.COLLECTION_LITERAL,
    "argument_list": _C.ARGUMENT_LIST,
    "identifier": _C.IDENTIFIER,
    "string_literal": _C.STRING_LITERAL,
    "raw_string_literal": _C.STRING_LITERAL,
    "char_literal": _C.STRING_LITERAL,
    "number_literal": _C.NUMBER_LITERAL,
    "true": _C.BOOLEAN_LITERAL,
    "false": _C.BOOLEAN_LITERAL,
    "nullptr": _C.NULL_LITERAL,
    "comment": _C.COMMENT,
    "ERROR": _C.UNKNOWN,
}

_KIND_TABLES = {
    Language.PYTHON: _PYTHON_KINDS,
    Language.JAVA: _JAVA_KINDS,
    Language.CPP: _CPP_KINDS,
}


def categorize_node(native_type: str, language: Language) -> UniversalCategory:
    """Total mapping from a native grammar kind to its universal category."""
    cat = _KIND_TABLES[language].get(native_type)
    if cat is not None:
        return cat
    if native_type in KEYWORDS[language]:
        return _C.KEYWORD
    if native_type in _OPERATOR_TOKENS:
        return _C.OPERATOR
    if native_type in _PUNCT_TOKENS:
        return _C.PUNCTUATION
    return _C.UNKNOWN


# Cross-language semantic mapping: construct kinds that denote scope-bound
# resource management in each grammar.
SCOPED_RESOURCE_KINDS = {
    Language.PYTHON: {"with_statement"},
    Language.JAVA: {"try_with_resources_statement"},
    Language.CPP: set(),
}

# C++ has no syntactic resource construct; RAII guards are recognized by the
# declared type instead.
CPP_RAII_TYPE_MARKERS = (
    "lock_guard", "unique_lock", "scoped_lock", "unique_ptr", "shared_ptr",
    "ifstream", "ofstream", "fstream",
)

ROLE_SCOPED_RESOURCE = "SCOPED_RESOURCE"
ROLE_ENTRY_POINT = "ENTRY_POINT"
