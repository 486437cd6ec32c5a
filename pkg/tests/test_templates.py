import pytest

from portal_harvester import DEFAULT_REGISTRY_PATH
from portal_harvester.templates import (
    CompiledTemplate, FieldRule, MissingRequiredFieldError, ScrapeTemplate,
    TemplateError, TemplateSelectorError, compile_template, load_template,
    template_from_dict, template_to_dict)

TEMPLATES_DIR = DEFAULT_REGISTRY_PATH.parent / "templates"


def minimal_template(**overrides):
    fields = {
        "title": FieldRule(selector="h3 a", capture="text", required=True),
        "link": FieldRule(selector="h3 a", capture="attr:href", required=True),
    }
    params = dict(portal_id="demo", record_selector="div.result",
                  field_rules=fields)
    params.update(overrides)
    return ScrapeTemplate(**params)


def test_minimal_template_compiles():
    compiled = compile_template(minimal_template())
    assert isinstance(compiled, CompiledTemplate)
    assert compiled.diagnostics == ()


def test_empty_record_selector_rejected():
    with pytest.raises(MissingRequiredFieldError):
        compile_template(minimal_template(record_selector=""))


def test_missing_link_rule_rejected():
    template = minimal_template()
    fields = {"title": template.field_rules["title"]}
    with pytest.raises(MissingRequiredFieldError):
        compile_template(minimal_template(field_rules=fields))


def test_title_must_be_required():
    fields = {
        "title": FieldRule(selector="h3", capture="text", required=False),
        "link": FieldRule(selector="a", capture="attr:href", required=True),
    }
    with pytest.raises(TemplateError):
        compile_template(minimal_template(field_rules=fields))


def test_bad_selector_reports_field():
    fields = {
        "title": FieldRule(selector="h3 > a", capture="text", required=True),
        "link": FieldRule(selector="a", capture="attr:href", required=True),
    }
    with pytest.raises(TemplateSelectorError) as excinfo:
        compile_template(minimal_template(field_rules=fields))
    assert excinfo.value.field == "title"


def test_resolve_url_restricted_to_url_fields():
    fields = {
        "title": FieldRule(selector="h3", capture="text", required=True,
                           transforms=("resolve-url",)),
        "link": FieldRule(selector="a", capture="attr:href", required=True),
    }
    with pytest.raises(TemplateError):
        compile_template(minimal_template(field_rules=fields))


def test_duplicate_transforms_rejected():
    fields = {
        "title": FieldRule(selector="h3", capture="text", required=True,
                           transforms=("trim", "trim")),
        "link": FieldRule(selector="a", capture="attr:href", required=True),
    }
    with pytest.raises(TemplateError):
        compile_template(minimal_template(field_rules=fields))


def test_compilation_deterministic():
    template = minimal_template()
    a = compile_template(template)
    b = compile_template(template)
    assert a.record_program == b.record_program
    assert a.field_programs == b.field_programs


def test_structured_text_dotted_paths():
    fields = {
        "title": FieldRule(selector="judul", required=True),
        "link": FieldRule(selector="link", required=True),
    }
    compiled = compile_template(minimal_template(
        payload_kind="structured-text", record_selector="results",
        field_rules=fields))
    assert compiled.payload_kind == "structured-text"


def test_structured_text_rejects_attr_capture():
    fields = {
        "title": FieldRule(selector="judul", required=True),
        "link": FieldRule(selector="link", capture="attr:href", required=True),
    }
    with pytest.raises(TemplateError):
        compile_template(minimal_template(
            payload_kind="structured-text", record_selector="results",
            field_rules=fields))


@pytest.mark.parametrize("name", ["garuda", "isjd", "scholar"])
def test_bundled_templates_compile_clean(name):
    template = load_template(TEMPLATES_DIR / f"{name}.json")
    compiled = compile_template(template)
    assert compiled.diagnostics == ()


def test_file_form_round_trip():
    template = load_template(TEMPLATES_DIR / "garuda.json")
    assert template_from_dict(template_to_dict(template)) == template
