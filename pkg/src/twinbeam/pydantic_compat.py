"""Thin layer so the config models work on pydantic v1 and v2."""
from pydantic import BaseModel as PydanticBaseModel

try:
    from pydantic import field_validator as _field_validator

    PYDANTIC_V2 = True
except ImportError:  # pragma: no cover - pydantic v1
    from pydantic import validator as _validator

    PYDANTIC_V2 = False


def field_validator(*fields):
    """Field validator usable with ``(cls, value)`` signatures on both majors."""
    if PYDANTIC_V2:
        def decorator(func):
            return _field_validator(*fields)(classmethod(func))
        return decorator

    def decorator(func):
        return _validator(*fields, allow_reuse=True)(func)
    return decorator


class BaseModel(PydanticBaseModel):
    @classmethod
    def model_validate(cls, obj, *args, **kwargs):
        parent = super()
        if hasattr(parent, "model_validate"):
            return parent.model_validate(obj, *args, **kwargs)
        return cls.parse_obj(obj)

    def model_dump(self, *args, **kwargs):
        parent = super()
        if hasattr(parent, "model_dump"):
            return parent.model_dump(*args, **kwargs)
        return self.dict(*args, **kwargs)

    def model_dump_json(self, *args, **kwargs):
        parent = super()
        if hasattr(parent, "model_dump_json"):
            return parent.model_dump_json(*args, **kwargs)
        return self.json(*args, **kwargs)

    def model_copy(self, *args, **kwargs):
        """Copy with ``update=``; updated values are re-validated."""
        update = kwargs.pop("update", None) or {}
        data = self.model_dump()
        data.update(update)
        return type(self).model_validate(data)
