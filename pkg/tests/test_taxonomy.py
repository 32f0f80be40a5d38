from __future__ import annotations

from vlf.uast import CATEGORY_COUNT, Language, UniversalCategory, categorize_node


def test_exactly_47_categories_with_stable_codes():
    codes = sorted(int(c) for c in UniversalCategory)
    assert codes == list(range(CATEGORY_COUNT))
    assert CATEGORY_COUNT == 47
    names = {c.name for c in UniversalCategory}
    assert len(names) == 47


def test_mandatory_members_present():
    assert UniversalCategory.FUNCTION_DECLARATION in UniversalCategory
    assert UniversalCategory.VARIABLE_ASSIGNMENT in UniversalCategory
    assert UniversalCategory.CONTROL_FLOW in UniversalCategory
    assert UniversalCategory.UNKNOWN == 0


def test_categorize_python_kinds():
    assert categorize_node("function_definition", Language.PYTHON) is UniversalCategory.FUNCTION_DECLARATION
    assert categorize_node("assignment", Language.PYTHON) is UniversalCategory.VARIABLE_ASSIGNMENT
    assert categorize_node("call", Language.PYTHON) is UniversalCategory.CALL
    assert categorize_node("with_statement", Language.PYTHON) is UniversalCategory.RESOURCE_MANAGEMENT


def test_categorize_java_kinds():
    assert categorize_node("method_declaration", Language.JAVA) is UniversalCategory.FUNCTION_DECLARATION
    assert categorize_node("method_invocation", Language.JAVA) is UniversalCategory.CALL
    assert categorize_node("try_with_resources_statement", Language.JAVA) is UniversalCategory.RESOURCE_MANAGEMENT


def test_categorize_cpp_kinds():
    assert categorize_node("function_definition", Language.CPP) is UniversalCategory.FUNCTION_DECLARATION
    assert categorize_node("call_expression", Language.CPP) is UniversalCategory.CALL
    assert categorize_node("preproc_include", Language.CPP) is UniversalCategory.IMPORT


def test_unknown_fallback_is_total():
    assert categorize_node("zzz_nonexistent", Language.CPP) is UniversalCategory.UNKNOWN
    assert categorize_node("", Language.PYTHON) is UniversalCategory.UNKNOWN
    assert categorize_node("ERROR", Language.JAVA) is UniversalCategory.UNKNOWN


def test_leaf_token_tables():
    assert categorize_node("def", Language.PYTHON) is UniversalCategory.KEYWORD
    assert categorize_node("+", Language.PYTHON) is UniversalCategory.OPERATOR
    assert categorize_node("(", Language.JAVA) is UniversalCategory.PUNCTUATION
    assert categorize_node("::", Language.CPP) is UniversalCategory.PUNCTUATION
