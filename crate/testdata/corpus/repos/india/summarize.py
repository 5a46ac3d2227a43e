# Meeting-notes summarizer. Planted: one call with no resource bounds at
# all (UMM x1) and no system message (NSM x1); model pinned, temperature set.

from openai import OpenAI

client = OpenAI()


def summarize(notes):
    response = client.chat.completions.create(
        model="gpt-4o-2024-08-06",
        messages=[{"role": "user", "content": "Summarize these notes: " + notes}],
        temperature=0.3,
    )
    return response.choices[0].message.content
