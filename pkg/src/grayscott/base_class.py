"""Base class for configuration objects."""

import inspect
from collections import defaultdict
from typing import Any


class Base:
    """Base class for simulator configuration objects.

    A base class with utilities for getting and setting parameters by
    introspection of ``__init__``.

    Notes
    -----
    The class provides helper methods mimicking scikit-learn's get_params and set_params.
    Parameters that are ``NamedTuple`` instances (model parameters, lattice,
    kernel and seeding recipes) are exposed with ``<parameter>__<field>`` keys
    and updated through ``_replace``, so that the immutable value objects are
    never mutated in place.
    """

    def get_params(self, deep=True):
        """
        From scikit-learn, get parameters by inspecting init.

        Parameters
        ----------
        deep
            If True, also return the fields of nested objects and named tuples
            as ``<parameter>__<field>``.

        Returns
        -------
            out:
                A dictionary containing the parameters. Key is the parameter
                name, value is the parameter value.
        """
        out = dict()
        for key in self._get_param_names():
            value = getattr(self, key)
            if deep and hasattr(value, "get_params") and not isinstance(value, type):
                deep_items = value.get_params().items()
                out.update((key + "__" + k, val) for k, val in deep_items)
            elif deep and _is_namedtuple(value):
                out.update((key + "__" + k, val) for k, val in value._asdict().items())
            out[key] = value
        return out

    def set_params(self, **params: Any):
        """Set the parameters of this object.

        Nested parameters have the form ``<component>__<parameter>`` so that
        it's possible to update each component of a nested object.

        Parameters
        ----------
        **params : dict
            Parameters.

        Returns
        -------
        self :
            The updated instance.

        Raises
        ------
        ValueError
            If a key does not name a parameter.
        """
        if not params:
            # Simple optimization to gain speed (inspect is slow)
            return self
        valid_params = self.get_params(deep=True)
        nested_params: defaultdict = defaultdict(dict)  # grouped by prefix
        for key, value in params.items():
            key, delim, sub_key = key.partition("__")
            if key not in valid_params:
                local_valid_params = self._get_param_names()
                raise ValueError(
                    f"Invalid parameter {key!r} for {self.__class__.__name__}. "
                    f"Valid parameters are: {local_valid_params!r}."
                )

            if delim:
                nested_params[key][sub_key] = value
            else:
                setattr(self, key, value)
                valid_params[key] = value

        for key, sub_params in nested_params.items():
            component = valid_params[key]
            if _is_namedtuple(component):
                unknown = set(sub_params).difference(component._fields)
                if unknown:
                    raise ValueError(
                        f"Invalid parameter(s) {sorted(unknown)!r} for {key!r}. "
                        f"Valid parameters are: {list(component._fields)!r}."
                    )
                setattr(self, key, component._replace(**sub_params))
            else:
                component.set_params(**sub_params)

        return self

    @classmethod
    def _get_param_names(cls):
        """Get parameter names for the object."""
        init = cls.__init__
        if init is object.__init__:
            # No explicit constructor to introspect
            return []

        # introspect the constructor arguments to find the model parameters
        # to represent
        init_signature = inspect.signature(init)
        for p in init_signature.parameters.values():
            if p.kind == p.VAR_POSITIONAL:
                raise RuntimeError(
                    "Configuration objects should always "
                    "specify their parameters in the signature"
                    " of their __init__ (no varargs)."
                    " %s with constructor %s doesn't "
                    " follow this convention." % (cls, init_signature)
                )

        # Consider the constructor parameters excluding 'self' and kwargs
        parameters = [
            p.name
            for p in init_signature.parameters.values()
            if p.name != "self" and p.kind != p.VAR_KEYWORD
        ]
        return sorted(parameters)


def _is_namedtuple(value: Any) -> bool:
    return isinstance(value, tuple) and hasattr(value, "_fields")
