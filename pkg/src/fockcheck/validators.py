"""The validators module.

Schema helpers used to describe the JSON inputs.
"""

from collections import OrderedDict
from collections.abc import Mapping
import math
import numbers

from .base import NotSet
from .schema import (
    ALLOW_EXTRA,
    DENY_EXTRA,
    Schema,
    SchemaABC,
    SchemaResult,
    _HashableSchema
)


class Type(_HashableSchema, SchemaABC):
    """Schema helper that validates against types.

    Args:
        spec (type|tuple[type]): A type or tuple of types to validate against.
    """
    def compile(self):
        if isinstance(self.spec, type):
            schema = (self.spec,)
        elif (isinstance(self.spec, tuple) and
                all(isinstance(s, type) for s in self.spec)):
            schema = self.spec
        else:
            raise TypeError('{} schema spec must be a type or a tuple of types'
                            .format(self.__class__.__name__))
        return schema

    def __call__(self, obj):
        # bool is an int subclass but never a valid number in an input file.
        if isinstance(obj, bool) and bool not in self.schema:
            raise AssertionError(self._format_error(obj))

        if not isinstance(obj, self.schema):
            raise AssertionError(self._format_error(obj))

        return obj

    def _format_error(self, obj):
        expected = ' or '.join(sorted((t.__name__ for t in self.schema),
                                      key=lambda n: n.lower()))

        return ('type error, expected {} but found {}'
                .format(expected, type(obj).__name__))


class Value(_HashableSchema, SchemaABC):
    """Schema helper that validates against value equality.

    Args:
        spec (object): Value to compare to.
    """
    def __call__(self, obj):
        if obj != self.schema:
            raise AssertionError('value error, expected {!r} but found {!r}'
                                 .format(self.schema, obj))

        return obj


class List(SchemaABC):
    """Schema helper that validates every item of a list.

    Unlike an object schema, a bad item invalidates the whole list: a
    coefficient list with a hole in it is never usable.

    Args:
        spec (list): List containing the item schema specifications; each
            item must pass all of them.
    """
    _validate_obj = Type(list)

    def compile(self):
        if not isinstance(self.spec, list):
            raise TypeError('{} schema spec must be a list'
                            .format(self.__class__.__name__))

        return All(*self.spec)

    def __call__(self, obj):
        self._validate_obj(obj)

        data = []
        errors = {}

        for index, value in enumerate(obj):
            result = self.schema(value)

            if result.errors:
                error = result.errors
                if isinstance(error, str):
                    error = 'bad value: {}'.format(error)
                errors[index] = error
            else:
                data.append(result.data)

        if errors:
            data = None

        return SchemaResult(data, errors)


class Dict(SchemaABC):
    """Schema helper that validates JSON objects.

    Keys are literal strings (required unless wrapped in :class:`.Optional`).
    A ``str`` key schema accepts any other key with the given value schema.

    Args:
        spec (dict): Dictionary containing the schema specification.
        extra (bool|None, optional): Extra keys policy. Defaults to
            :const:`DENY_EXTRA`.
    """
    _validate_obj = Type(Mapping)

    def __init__(self, spec, extra=DENY_EXTRA):
        self.extra = extra

        super().__init__(spec)

    def compile(self):
        if not isinstance(self.spec, dict):
            raise TypeError('{} schema spec must be a dict'
                            .format(self.__class__.__name__))

        schema = OrderedDict()
        self.catchall = None
        self.required = []
        self.defaults = {}

        for key, value in self.spec.items():
            value_schema = Schema(value, extra=self.extra)

            if key is str:
                self.catchall = value_schema
                continue

            if isinstance(key, Optional):
                name = key.spec
                if key.default is not NotSet:
                    self.defaults[name] = key
            else:
                name = key
                self.required.append(name)

            schema[name] = value_schema

        return schema

    def __call__(self, obj):
        self._validate_obj(obj)

        data = {}
        errors = {}

        for key, value in obj.items():
            value_schema = self.schema.get(key)

            if value_schema is None and isinstance(key, str):
                value_schema = self.catchall

            if value_schema is None:
                if self.extra is ALLOW_EXTRA:
                    data[key] = value
                elif self.extra is DENY_EXTRA:
                    errors[key] = ('bad key: not in {}'
                                   .format(sorted(self.schema)))
                continue

            result = value_schema(value, strict=False)

            if result.errors:
                error = result.errors
                if isinstance(error, str):
                    error = 'bad value: {}'.format(error)
                errors[key] = error
            else:
                data[key] = result.data

        for key in self.required:
            if key not in obj:
                errors[key] = 'missing required key'

        for key, optional in self.defaults.items():
            if key not in obj:
                data[key] = optional.default

        if errors:
            data = None

        return SchemaResult(data, errors)


class Optional(_HashableSchema, SchemaABC):
    """Schema helper used to mark a :class:`.Dict` key as optional.

    Args:
        spec (str): Key name.
        default (object, optional): Default value or callable that returns a
            default to be used when the key isn't given.
    """
    def __init__(self, spec, default=NotSet):
        self._default = default
        super().__init__(spec)

    @property
    def default(self):
        if callable(self._default):
            return self._default()
        return self._default

    def __call__(self, obj):
        return self.schema(obj)


class All(SchemaABC):
    """Schema helper that validates against a list of schemas where all
    schemas must validate. Each schema receives the data parsed by the
    previous one.

    Args:
        *specs (object): Schema specifications to validate against.
    """
    def __init__(self, *specs):
        super().__init__(specs)

    def compile(self):
        return tuple(Schema(s) for s in self.spec)

    def __call__(self, obj):
        result = SchemaResult(obj, None)

        for schema in self.schema:
            result = schema(result.data)

            if result.errors:
                break

        return result


class Any(SchemaABC):
    """Schema helper that validates against a list of schemas where at least
    one schema must validate.

    Args:
        *specs (object): Schema specifications to validate against.
    """
    def __init__(self, *specs):
        super().__init__(specs)

    def compile(self):
        return tuple(Schema(s) for s in self.spec)

    def __call__(self, obj):
        result = SchemaResult(obj, None)

        for schema in self.schema:
            result = schema(obj)

            if not result.errors:
                break

        return result


class Tagged(SchemaABC):
    """Schema helper that dispatches on a tag field of a JSON object.

    Args:
        tag (str): Name of the tag field (e.g. ``'kind'`` or ``'type'``).
        choices (dict): Map of tag value to the object schema for that tag.
            The object schema must list the tag key itself.
    """
    _validate_obj = Type(Mapping)

    def __init__(self, tag, choices):
        self.tag = tag
        super().__init__(choices)

    def compile(self):
        return {name: Schema(spec) for name, spec in self.spec.items()}

    def __call__(self, obj):
        self._validate_obj(obj)

        if self.tag not in obj:
            return SchemaResult(None, {self.tag: 'missing required key'})

        schema = self.schema.get(obj[self.tag])

        if schema is None:
            return SchemaResult(None, {
                self.tag: 'bad value: expected one of {} but found {!r}'
                          .format(sorted(self.schema), obj[self.tag])})

        return schema(obj, strict=False)


class Validate(SchemaABC):
    """Schema helper that validates against a callable.

    Validation passes if the callable returns ``None`` or a truthy value and
    fails if it raises or returns a non-None falsey value.

    Args:
        spec (callable): Callable to validate against.
    """
    def compile(self):
        if not callable(self.spec):
            raise TypeError('{} schema spec must be callable'
                            .format(self.__class__.__name__))

        return self.spec

    def __call__(self, obj):
        ret = False
        err = None

        try:
            ret = self.schema(obj)
        except Exception as exc:
            err = str(exc)

        if not err and not ret and ret is not None:
            err = ('{}({!r}) should evaluate to True'
                   .format(self.spec_name, obj))

        if err:
            raise AssertionError(err)

        return obj


class As(SchemaABC):
    """Schema helper that replaces a parsed value with the return of a
    callable. An exception raised by the callable fails validation.

    Args:
        spec (callable): Callable that transforms a value.
    """
    def compile(self):
        if not callable(self.spec):
            raise TypeError('{} schema spec must be callable'
                            .format(self.__class__.__name__))

        return self.spec

    def __call__(self, obj):
        try:
            return self.schema(obj)
        except Exception as exc:
            raise AssertionError(
                '{}({!r}) should not raise an exception: {}: {}'
                .format(self.spec_name, obj, exc.__class__.__name__, exc))


#: A finite JSON number.
Number = All((int, float), Validate(lambda x: math.isfinite(x) or
                                    _fail('number must be finite')))

#: A strictly positive JSON number.
Positive = All(Number, Validate(lambda x: x > 0 or
                                _fail('number must be positive')))

#: A non-negative JSON integer.
Count = All(int, Validate(lambda x: x >= 0 or
                          _fail('integer must be non-negative')))


def to_complex(obj):
    """Parse a JSON complex number: a real number or a ``[re, im]`` pair.

    Example:

        >>> to_complex([1, -2])
        (1-2j)
        >>> to_complex(3)
        (3+0j)
    """
    if isinstance(obj, numbers.Real) and not isinstance(obj, bool):
        return complex(obj)

    if (isinstance(obj, list) and len(obj) == 2 and
            all(isinstance(x, numbers.Real) and not isinstance(x, bool)
                for x in obj)):
        return complex(obj[0], obj[1])

    raise ValueError('expected a number or a [re, im] pair')


#: A JSON complex number parsed into :class:`complex`.
Complex = As(to_complex)


def _fail(message):
    raise ValueError(message)
