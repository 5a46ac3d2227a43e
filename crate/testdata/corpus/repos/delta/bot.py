# Demo bot. No LLM package is declared in requirements.txt, so dependency
# verification excludes this repo from the corpus by default. If it is
# included (--include-unverified), the single call carries all five smells.

import json

from openai import OpenAI

client = OpenAI()


def answer(question):
    response = client.chat.completions.create(
        model="gpt-4o",
        messages=[{"role": "user", "content": question}],
    )
    return json.loads(response.choices[0].message.content)
