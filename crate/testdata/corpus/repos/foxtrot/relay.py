# Parameters arrive pre-assembled from the caller. The ** expansion makes
# every role present-but-unverifiable, so the default run reports nothing
# here; the call still counts as a call site.

from openai import OpenAI

client = OpenAI()


def relay(params):
    return client.chat.completions.create(**params)
