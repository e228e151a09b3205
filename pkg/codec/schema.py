# Structured-output constraint attached to every cleaning request.
CLEANING_RESPONSE_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "prefix": {
                "type": "string",
                "description": "Beginning text of paragraph to delete.",
            },
            "suffix": {
                "type": "string",
                "description": "Ending text of paragraph to delete.",
            },
        },
        "required": ["prefix", "suffix"],
    },
    "description": "A list of prefix/suffix pairs that uniquely identify paragraphs "
    "that are redundant or irrelevant and should be deleted.",
}

MAX_PAIRS = 64

# Keys accepted when the model wraps the array in a single top-level object
WRAPPER_KEYS = ("pairs", "deletions", "items", "delete", "commands")
